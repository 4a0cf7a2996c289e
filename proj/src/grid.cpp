#include "rfcorr/grid.hpp"

#include <json.hpp>

#include <fstream>
#include <iostream>
#include <stdexcept>

#include "rfcorr/types.hpp"

namespace rfcorr {

using nlohmann::json;

void CorrelationGrid::check() const {
    if (value_names.size() != values.size())
        throw std::logic_error("CorrelationGrid: value column names do not match columns");
    for (const auto& col : values)
        if (col.size() != point_count())
            throw std::logic_error("CorrelationGrid: value count does not match axis product");
}

std::vector<size_t> CorrelationGrid::unravel(size_t index) const {
    std::vector<size_t> out(axes.size(), 0);
    for (size_t a = axes.size(); a-- > 0;) {
        out[a] = index % axes[a].values.size();
        index /= axes[a].values.size();
    }
    return out;
}

void write_csv(const CorrelationGrid& grid, std::ostream& os) {
    grid.check();
    char buf[64];
    bool first = true;
    for (const auto& a : grid.axes) {
        os << (first ? "" : ",") << a.name;
        first = false;
    }
    for (const auto& n : grid.value_names) os << (first ? "" : ",") << n, first = false;
    os << "\n";
    const size_t total = grid.point_count();
    for (size_t i = 0; i < total; ++i) {
        auto idx = grid.unravel(i);
        first = true;
        for (size_t a = 0; a < grid.axes.size(); ++a) {
            std::snprintf(buf, sizeof buf, "%.17g", grid.axes[a].values[idx[a]]);
            os << (first ? "" : ",") << buf;
            first = false;
        }
        for (const auto& col : grid.values) {
            std::snprintf(buf, sizeof buf, "%.17g", col[i]);
            os << (first ? "" : ",") << buf;
            first = false;
        }
        os << "\n";
    }
}

static json grid_to_json(const CorrelationGrid& grid) {
    json j;
    j["axes"] = json::array();
    for (const auto& a : grid.axes)
        j["axes"].push_back({{"name", a.name}, {"unit", a.unit}, {"values", a.values}});
    j["value_names"] = grid.value_names;
    j["values"] = grid.values;
    j["metadata"] = grid.metadata;
    return j;
}

void write_json(const CorrelationGrid& grid, std::ostream& os) {
    grid.check();
    os << grid_to_json(grid).dump(2) << "\n";
}

CorrelationGrid read_json(std::istream& is) {
    json j = json::parse(is);
    CorrelationGrid g;
    for (const auto& a : j.at("axes"))
        g.axes.push_back({a.at("name").get<std::string>(), a.at("unit").get<std::string>(),
                          a.at("values").get<std::vector<double>>()});
    g.value_names = j.at("value_names").get<std::vector<std::string>>();
    g.values = j.at("values").get<std::vector<std::vector<double>>>();
    g.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
    g.check();
    return g;
}

void write_grid_file(const CorrelationGrid& grid, const std::string& path,
                     const std::string& format) {
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!path.empty() && path != "-") {
        file.open(path);
        if (!file) throw ConfigError("cannot open output file: " + path);
        os = &file;
    }
    if (format == "csv")
        write_csv(grid, *os);
    else if (format == "json")
        write_json(grid, *os);
    else
        throw ConfigError("unknown output format: " + format);
}

}  // namespace rfcorr

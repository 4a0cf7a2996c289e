#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace rfcorr {

/// Rectangular scan result: axis values plus one or more value columns in
/// row-major order over the axis product. Metadata echoes the full run
/// configuration so a run can be reproduced from its output.
struct CorrelationGrid {
    struct Axis {
        std::string name;
        std::string unit;
        std::vector<double> values;
    };

    std::vector<Axis> axes;
    std::vector<std::string> value_names;
    std::vector<std::vector<double>> values;  // one vector per value column
    std::map<std::string, std::string> metadata;

    size_t point_count() const {
        size_t n = 1;
        for (const auto& a : axes) n *= a.values.size();
        return n;
    }
    void check() const;

    /// Row-major index decomposition: index -> per-axis indices.
    std::vector<size_t> unravel(size_t index) const;
};

/// One header line (axis names then value names), rows with 17 significant
/// digits; lossless for doubles.
void write_csv(const CorrelationGrid& grid, std::ostream& os);

/// Verbatim JSON image of the grid including metadata.
void write_json(const CorrelationGrid& grid, std::ostream& os);
CorrelationGrid read_json(std::istream& is);

void write_grid_file(const CorrelationGrid& grid, const std::string& path, const std::string& format);

}  // namespace rfcorr

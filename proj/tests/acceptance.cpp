// Acceptance suite: one pass/fail line per criterion with measured values.
// Usage: acceptance [--criterion N]
#include <cstring>
#include <iostream>

#include "rfcorr/battery.hpp"

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            only = std::atoi(argv[i + 1]);
            ++i;
        } else {
            std::cerr << "usage: acceptance [--criterion N]\n";
            return 2;
        }
    }

    bool all_pass = true;
    for (int n = 1; n <= 9; ++n) {
        if (only != 0 && n != only) continue;
        bool pass = true;
        std::string detail;
        try {
            for (const auto& c : rfcorr::acceptance_criterion(n)) {
                pass = pass && c.pass;
                char buf[64];
                std::snprintf(buf, sizeof buf, "%.6g", c.measured);
                detail += "\n    " + std::string(c.pass ? "[ok]  " : "[BAD] ") + c.name + " = " +
                          buf + "  (" + c.requirement + ")" +
                          (c.details.empty() ? "" : "  " + c.details);
            }
        } catch (const std::exception& e) {
            pass = false;
            detail += std::string("\n    exception: ") + e.what();
        }
        std::cout << "CRITERION " << n << (pass ? " PASS" : " FAIL") << detail << "\n";
        all_pass = all_pass && pass;
    }
    return all_pass ? 0 : 1;
}

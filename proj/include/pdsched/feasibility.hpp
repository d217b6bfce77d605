#pragma once

#include <string>
#include <vector>

namespace pdsched {

/// Per-constraint-family check result with the first counterexample.
struct FeasibilityReport {
    struct Family {
        std::string name;
        bool ok = true;
        std::string detail;  // first violation, empty when ok
    };

    std::vector<Family> families;
    bool feasible = true;

    void record(const std::string& name, bool ok, const std::string& detail = "") {
        families.push_back({name, ok, ok ? "" : detail});
        feasible = feasible && ok;
    }
    std::string summary() const;
};

}  // namespace pdsched

#pragma once

#include <string>
#include <vector>

#include "boxgas/common.hpp"

namespace boxgas {

// Piecewise-linear function of r >= 0 given by ascending nodes. Left of the
// first node the first value holds; right of the last node the function is
// identically zero (compact support) unless hold_right is set, in which case
// the last value holds.
struct TableFn {
    std::vector<double> r;
    std::vector<double> v;
    bool hold_right = false;

    bool empty() const { return r.empty(); }
    double last_r() const { return r.empty() ? 0.0 : r.back(); }

    double operator()(double x) const;

    void validate(const std::string& what) const;
};

// Two-column text (r value per line, '#' comments allowed).
TableFn load_table(const std::string& path);

}  // namespace boxgas

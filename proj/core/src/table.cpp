#include "boxgas/table.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace boxgas {

double TableFn::operator()(double x) const {
    if (r.empty()) return 0.0;
    if (x <= r.front()) return v.front();
    if (x >= r.back()) return hold_right ? v.back() : (x == r.back() ? v.back() : 0.0);
    const auto it = std::upper_bound(r.begin(), r.end(), x);
    const size_t i = static_cast<size_t>(it - r.begin());
    const double t = (x - r[i - 1]) / (r[i] - r[i - 1]);
    return v[i - 1] + t * (v[i] - v[i - 1]);
}

void TableFn::validate(const std::string& what) const {
    if (r.size() != v.size()) throw std::invalid_argument(what + ": column length mismatch");
    if (r.empty()) throw std::invalid_argument(what + ": empty table");
    for (size_t i = 0; i + 1 < r.size(); ++i)
        if (!(r[i] < r[i + 1])) throw std::invalid_argument(what + ": radii must be ascending");
    if (r.front() < 0.0) throw std::invalid_argument(what + ": radii must be >= 0");
}

TableFn load_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("load_table: cannot open " + path);
    TableFn t;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        double a, b;
        if (ss >> a >> b) {
            t.r.push_back(a);
            t.v.push_back(b);
        }
    }
    t.validate("load_table(" + path + ")");
    return t;
}

}  // namespace boxgas

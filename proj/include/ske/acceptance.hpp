#pragma once

#include <string>
#include <vector>

namespace ske::acceptance {

// Resolution knobs shared by the acceptance suite (full) and the CLI
// selftest (reduced).
struct settings {
    int grid_n = 2048;
    int m_max = 40;
    int eps_rungs = 14;
    bool reduced = false;

    static settings full() { return settings{}; }
    static settings selftest() { return settings{512, 20, 14, true}; }
};

struct criterion_result {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

criterion_result run_one(int id, const settings& s);
std::vector<criterion_result> run_all(const settings& s);

} // namespace ske::acceptance

#ifndef HLAP_STEP_TWO_IO_HPP
#define HLAP_STEP_TWO_IO_HPP

#include <fstream>
#include <json.hpp>
#include <string>

#include "hlap/step_two.hpp"

namespace hlap::nilpotent {

/// Algebra definition: {"m": int, "l": int, "C": [[i, j, q, value], ...]}
/// with 1-based indices.  Antisymmetry is completed automatically;
/// inconsistent duplicate entries are rejected.
inline StepTwoAlgebra algebra_from_json(const nlohmann::json& j) {
    if (!j.contains("m") || !j.contains("l"))
        throw std::invalid_argument("algebra_from_json: missing 'm' or 'l'");
    StepTwoAlgebra algebra(j.at("m").get<int>(), j.at("l").get<int>());
    std::vector<RealMatrix> seen(static_cast<std::size_t>(algebra.l),
                                 RealMatrix::Zero(algebra.m, algebra.m));
    if (j.contains("C")) {
        for (const auto& entry : j.at("C")) {
            if (!entry.is_array() || entry.size() != 4)
                throw std::invalid_argument("algebra_from_json: C entries must be [i,j,q,value]");
            const int i = entry[0].get<int>();
            const int jj = entry[1].get<int>();
            const int q = entry[2].get<int>();
            const double value = entry[3].get<double>();
            if (q < 1 || q > algebra.l || i < 1 || i > algebra.m || jj < 1 || jj > algebra.m)
                throw std::invalid_argument("algebra_from_json: index out of range in C entry");
            RealMatrix& flag = seen[static_cast<std::size_t>(q - 1)];
            const double existing = algebra.C[static_cast<std::size_t>(q - 1)](i - 1, jj - 1);
            if (flag(i - 1, jj - 1) != 0.0 && existing != value)
                throw std::invalid_argument(
                    "algebra_from_json: inconsistent duplicate entry for [" + std::to_string(i) +
                    "," + std::to_string(jj) + "," + std::to_string(q) + "]");
            algebra.set_bracket(i, jj, q, value);
            flag(i - 1, jj - 1) = 1.0;
            flag(jj - 1, i - 1) = 1.0;
        }
    }
    algebra.validate();
    return algebra;
}

inline StepTwoAlgebra algebra_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("algebra_from_file: cannot open " + path);
    nlohmann::json j;
    in >> j;
    return algebra_from_json(j);
}

inline nlohmann::json algebra_to_json(const StepTwoAlgebra& algebra) {
    nlohmann::json entries = nlohmann::json::array();
    for (int q = 0; q < algebra.l; ++q)
        for (int i = 0; i < algebra.m; ++i)
            for (int j = i + 1; j < algebra.m; ++j) {
                const double v = algebra.C[static_cast<std::size_t>(q)](i, j);
                if (v != 0.0) entries.push_back({i + 1, j + 1, q + 1, v});
            }
    return {{"m", algebra.m}, {"l", algebra.l}, {"C", entries}};
}

}  // namespace hlap::nilpotent

#endif  // HLAP_STEP_TWO_IO_HPP

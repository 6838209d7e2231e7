#pragma once

#include <string>
#include <vector>

#include <gaugeloc/complex.hpp>

namespace gaugeloc {

// ---------------------------------------------------------------------------
// Named complexes used across the test-bed and the CLI: cylinders over a
// circle, flat planes and annuli, long and short Minkowski strips, and their
// two-component variants. All spacings are 1.
// ---------------------------------------------------------------------------

inline ComplexSpec preset_spec(const std::string& name) {
    ComplexSpec s;
    s.time = time_axis(6);
    if (name == "CYL2") {
        s.components.push_back({{circle_axis(8)}, {}});
    } else if (name == "PLANE3") {
        s.components.push_back({{interval_axis(6), interval_axis(6)}, {}});
    } else if (name == "ANN3") {
        s.components.push_back(
            {{interval_axis(6), interval_axis(6)}, {{2, 2}, {2, 3}, {3, 2}, {3, 3}}});
    } else if (name == "ANNS") {
        s.components.push_back(
            {{interval_axis(4), interval_axis(4)}, {{1, 1}, {1, 2}, {2, 1}, {2, 2}}});
    } else if (name == "TOR3") {
        s.components.push_back({{circle_axis(8), circle_axis(8)}, {}});
    } else if (name == "MINK2") {
        s.components.push_back({{interval_axis(44)}, {}});
    } else if (name == "STRIP") {
        s.components.push_back({{interval_axis(4)}, {}});
    } else if (name == "TWOSTRIP") {
        s.components.push_back({{interval_axis(4)}, {}});
        s.components.push_back({{interval_axis(4)}, {}});
    } else if (name == "TWOCYL") {
        s.components.push_back({{circle_axis(8)}, {}});
        s.components.push_back({{circle_axis(8)}, {}});
    } else if (name == "CYL2WIN") {
        s.time = time_axis(4);
        s.components.push_back({{circle_axis(8)}, {}});
    } else {
        throw ValidationError("unknown complex preset '" + name + "'");
    }
    return s;
}

inline ComplexPtr preset_complex(const std::string& name) { return build_complex(preset_spec(name)); }

inline std::vector<std::string> preset_complex_names() {
    return {"CYL2", "PLANE3", "ANN3", "ANNS", "TOR3", "MINK2", "STRIP", "TWOSTRIP", "TWOCYL",
            "CYL2WIN"};
}

// Named embeddings between preset complexes. The two strips land in MINK2 at
// spatial offsets 8 and 28, leaving a causal gap of 16 edges between them.
inline Embedding preset_embedding(const std::string& name, int collar_margin = 1) {
    if (name == "TWOSTRIP->TWOCYL")
        return make_embedding(preset_complex("TWOSTRIP"), preset_complex("TWOCYL"),
                              {{0, 0, {0}}, {1, 0, {0}}}, collar_margin);
    if (name == "TWOSTRIP->MINK2")
        return make_embedding(preset_complex("TWOSTRIP"), preset_complex("MINK2"),
                              {{0, 0, {8}}, {0, 0, {28}}}, collar_margin);
    if (name == "STRIP->MINK2#0")
        return make_embedding(preset_complex("STRIP"), preset_complex("MINK2"), {{0, 0, {8}}},
                              collar_margin);
    if (name == "STRIP->MINK2#1")
        return make_embedding(preset_complex("STRIP"), preset_complex("MINK2"), {{0, 0, {28}}},
                              collar_margin);
    if (name == "ANN3->PLANE3")
        return make_embedding(preset_complex("ANN3"), preset_complex("PLANE3"), {{0, 0, {0, 0}}},
                              collar_margin);
    if (name == "ANNS->ANN3")
        return make_embedding(preset_complex("ANNS"), preset_complex("ANN3"), {{0, 0, {1, 1}}},
                              collar_margin);
    if (name == "ANNS->PLANE3")
        return make_embedding(preset_complex("ANNS"), preset_complex("PLANE3"), {{0, 0, {1, 1}}},
                              collar_margin);
    if (name == "CYL2WIN->CYL2")
        return make_embedding(preset_complex("CYL2WIN"), preset_complex("CYL2"), {{0, 1, {0}}},
                              collar_margin);
    throw ValidationError("unknown embedding preset '" + name + "'");
}

inline std::vector<std::string> preset_embedding_names() {
    return {"TWOSTRIP->TWOCYL", "TWOSTRIP->MINK2", "STRIP->MINK2#0", "STRIP->MINK2#1",
            "ANN3->PLANE3",     "ANNS->ANN3",      "ANNS->PLANE3",   "CYL2WIN->CYL2"};
}

} // namespace gaugeloc

#pragma once

#include <cstdint>
#include <vector>

#include "leap/ast.hpp"

namespace leap::testsupport {

// splitmix64; a fixed seed reproduces the same stream on every platform,
// which std::uniform_int_distribution does not guarantee.
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::size_t below(std::size_t n) { return n == 0 ? 0 : next() % n; }
    bool chance(int percent) { return below(100) < static_cast<std::size_t>(percent); }
};

struct FuzzProgram {
    Program program;
    int act_count = 0; // sub-actions placed, counted while generating
};

// Structurally valid program: canonical condition forms, non-empty blocks,
// nesting within limits, comment anchors that interleave cleanly.
FuzzProgram random_program(Rng& rng, int index);

// Recursive count of ActStmt nodes, written apart from flatten().
int count_acts(const std::vector<Stmt>& body);

} // namespace leap::testsupport

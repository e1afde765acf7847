#pragma once

#include "omtk/error.hpp"
#include "omtk/model.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <functional>
#include <sstream>
#include <string>

namespace omtk::testing {

inline std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path);
    }
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline std::string golden(const std::string& name) { return slurp(std::string(OMTK_GOLDEN_DIR) + "/" + name); }

inline ErrorCode code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::IoError;
}

inline Model knapsack()
{
    Model m("knapsack");
    VarId x1 = m.add_binary("x1");
    VarId x2 = m.add_binary("x2");
    m.add_constraint({Bound{LinearExpr(x1) + Rational(2) * x2, Sense::LE, Rational(2)}, "capacity", 1});
    m.set_objective({Direction::Maximize, Rational(3) * x1 + Rational(4) * x2});
    return m;
}

} // namespace omtk::testing

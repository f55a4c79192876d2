#pragma once

#include <gtest/gtest.h>

#include <array>
#include <functional>

#include "scatterlab/core.hpp"

namespace scatterlab::test {

inline Grid square_grid(std::size_t n, double lo = 0.0, double hi = 1.0) {
  const std::array<std::size_t, 2> counts{n, n};
  return make_grid(Box::cube(2, lo, hi), counts);
}

inline Grid cube_grid(std::size_t n, double lo = 0.0, double hi = 1.0) {
  const std::array<std::size_t, 3> counts{n, n, n};
  return make_grid(Box::cube(3, lo, hi), counts);
}

inline void expect_error(ErrorKind kind, const std::function<void()>& f) {
  try {
    f();
    ADD_FAILURE() << "expected " << to_string(kind);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

}  // namespace scatterlab::test

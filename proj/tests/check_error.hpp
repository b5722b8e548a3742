#pragma once

#include <doctest.h>

#include "tailmax/errors.hpp"

// Asserts that `expr` throws tailmax::Error carrying `expected`.
#define CHECK_CODE(expr, expected)                      \
  do {                                                  \
    bool thrown_ = false;                               \
    try {                                               \
      (void)(expr);                                     \
    } catch (const tailmax::Error& e_) {                \
      thrown_ = true;                                   \
      CHECK(e_.code() == (expected));                   \
    }                                                   \
    CHECK_MESSAGE(thrown_, "expected an Error: " #expr); \
  } while (0)

#pragma once

#include <doctest.h>

#include "netheat/errors.hpp"

// Asserts that the expression throws netheat::Error with the given code.
#define CHECK_FAILS(code_, ...)                                  \
  do {                                                           \
    bool thrown_ = false;                                        \
    try {                                                        \
      (void)(__VA_ARGS__);                                       \
    } catch (const netheat::Error& e_) {                         \
      thrown_ = true;                                            \
      CHECK(e_.code() == netheat::ErrorCode::code_);             \
    }                                                            \
    CHECK_MESSAGE(thrown_, "expected " #code_ " from " #__VA_ARGS__); \
  } while (0)

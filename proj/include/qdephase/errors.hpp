// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace qdephase {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct NotHermitianError : Error {
  using Error::Error;
};
struct ShapeMismatchError : Error {
  using Error::Error;
};
struct DimensionMismatchError : Error {
  using Error::Error;
};
struct UnsupportedQubitCountError : Error {
  using Error::Error;
};
struct UnsupportedPartyCountError : Error {
  using Error::Error;
};
struct InvalidStateError : Error {
  using Error::Error;
};
struct AlphaOutOfRangeError : Error {
  using Error::Error;
};
struct RankDeficientConstraintsError : Error {
  using Error::Error;
};
struct NumericalFailureError : Error {
  using Error::Error;
};
struct CertificateInvalidError : Error {
  using Error::Error;
};
struct ConfigParseError : Error {
  using Error::Error;
};
struct UnknownFamilyError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

}  // namespace qdephase

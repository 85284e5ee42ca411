#ifndef RSC_ERRORS_HPP
#define RSC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rsc {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotPositiveDefinite : Error {
  explicit NotPositiveDefinite(const std::string& what = "matrix is not positive definite")
      : Error(what) {}
};

struct DimensionMismatch : Error {
  explicit DimensionMismatch(const std::string& what = "dimension mismatch") : Error(what) {}
};

struct DomainError : Error {
  using Error::Error;
};

struct InvalidBandwidth : Error {
  using Error::Error;
};

struct InvalidSize : Error {
  using Error::Error;
};

struct InvalidPermutation : Error {
  using Error::Error;
};

struct InvalidShape : Error {
  using Error::Error;
};

struct RankDeficientData : Error {
  explicit RankDeficientData(const std::string& what = "data does not span the full space")
      : Error(what) {}
};

struct DivergedWeights : Error {
  explicit DivergedWeights(const std::string& what = "non-finite iteration weights")
      : Error(what) {}
};

struct NotPerfectOrder : Error {
  explicit NotPerfectOrder(const std::string& what =
                               "natural order is not a perfect elimination order")
      : Error(what) {}
};

struct NonChordalPattern : Error {
  explicit NonChordalPattern(const std::string& what = "sparsity pattern is not chordal")
      : Error(what) {}
};

struct MaxIterExceeded : Error {
  using Error::Error;
};

struct NotDiagonallyDominant : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

struct WrongShape : Error {
  using Error::Error;
};

struct DataShapeMismatch : Error {
  using Error::Error;
};

}  // namespace rsc

#endif  // RSC_ERRORS_HPP

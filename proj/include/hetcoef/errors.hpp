#ifndef HETCOEF_ERRORS_HPP_
#define HETCOEF_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace hetcoef {

// Invalid data, configuration, or file contents. Maps to CLI exit code 1.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// The unpenalized design Gram matrix is numerically singular, so the
// requested fit is not identified from the data. Carries the observed
// minimum eigenvalue and the threshold it fell below so callers can
// distinguish an identification failure from plain ill-conditioning.
// Maps to CLI exit code 3.
class IdentificationError : public std::runtime_error {
 public:
  IdentificationError(const std::string& what, double min_eigenvalue,
                      double threshold)
      : std::runtime_error(what),
        min_eigenvalue_(min_eigenvalue),
        threshold_(threshold) {}

  double min_eigenvalue() const { return min_eigenvalue_; }
  double threshold() const { return threshold_; }

 private:
  double min_eigenvalue_;
  double threshold_;
};

}  // namespace hetcoef

#endif  // HETCOEF_ERRORS_HPP_

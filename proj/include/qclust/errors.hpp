#pragma once

#include <stdexcept>
#include <string>

namespace qclust {

// Exhaustive-search size caps and solver envelopes raise this instead of
// silently degrading.
class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

class InstanceTooSmallError : public std::runtime_error {
public:
    explicit InstanceTooSmallError(const std::string& what) : std::runtime_error(what) {}
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double triangle_residual, double psd_residual,
                int iterations)
        : std::runtime_error(what),
          triangle_residual(triangle_residual),
          psd_residual(psd_residual),
          iterations(iterations) {}

    double triangle_residual;
    double psd_residual;
    int iterations;
};

class EstimateInvalidError : public std::runtime_error {
public:
    explicit EstimateInvalidError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qclust

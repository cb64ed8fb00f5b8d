#pragma once

#include <stdexcept>
#include <string>

namespace smrm {

struct DegenerateLength : std::runtime_error {
    explicit DegenerateLength(const std::string& msg) : std::runtime_error(msg) {}
};

struct NotFullDeconvolutor : std::runtime_error {
    explicit NotFullDeconvolutor(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidParameter : std::runtime_error {
    explicit InvalidParameter(const std::string& msg) : std::runtime_error(msg) {}
};

struct EmptyTarget : std::runtime_error {
    explicit EmptyTarget(const std::string& msg) : std::runtime_error(msg) {}
};

struct NoReachableState : std::runtime_error {
    explicit NoReachableState(const std::string& msg) : std::runtime_error(msg) {}
};

struct SingularSystem : std::runtime_error {
    explicit SingularSystem(const std::string& msg) : std::runtime_error(msg) {}
};

struct SingularSliceMatrix : std::runtime_error {
    SingularSliceMatrix(const std::string& msg, std::size_t tau)
        : std::runtime_error(msg), tau(tau) {}
    std::size_t tau;
};

struct ReachabilityNotAlmostSure : std::runtime_error {
    explicit ReachabilityNotAlmostSure(const std::string& msg) : std::runtime_error(msg) {}
};

struct QuantileOutOfRange : std::runtime_error {
    explicit QuantileOutOfRange(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidMixture : std::runtime_error {
    explicit InvalidMixture(const std::string& msg) : std::runtime_error(msg) {}
};

struct GridMismatch : std::runtime_error {
    explicit GridMismatch(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonterminatingModel : std::runtime_error {
    explicit NonterminatingModel(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ResidualCheckFailed : std::runtime_error {
    explicit ResidualCheckFailed(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace smrm

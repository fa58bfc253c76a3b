#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cluster {

// Base of every error thrown by the engine.
class cluster_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class dimension_error : public cluster_error {
public:
    using cluster_error::cluster_error;
};

class index_error : public cluster_error {
public:
    using cluster_error::cluster_error;
};

class overflow_error : public cluster_error {
public:
    using cluster_error::cluster_error;
};

// Raised when a matrix violates a sign-pattern precondition
// (not sign-skew-symmetric at construction or after a mutation).
class sign_pattern_error : public cluster_error {
public:
    using cluster_error::cluster_error;
};

class signature_error : public cluster_error {
public:
    using cluster_error::cluster_error;
};

class division_failure : public cluster_error {
public:
    using cluster_error::cluster_error;
};

class not_homogeneous : public cluster_error {
public:
    using cluster_error::cluster_error;
};

class parse_error : public cluster_error {
public:
    using cluster_error::cluster_error;
};

// An asserted theorem-level property (positivity, homogeneity, constant
// term 1) did not hold for a freshly produced cluster variable. Carries the
// 1-based mutation path that produced the offending seed.
class assertion_failure : public cluster_error {
public:
    assertion_failure(const std::string& what, std::vector<int> path = {})
        : cluster_error(what), path_(std::move(path)) {}

    const std::vector<int>& path() const noexcept { return path_; }
    void set_path(std::vector<int> path) { path_ = std::move(path); }

private:
    std::vector<int> path_;
};

class budget_exceeded : public cluster_error {
public:
    using cluster_error::cluster_error;
};

}  // namespace cluster

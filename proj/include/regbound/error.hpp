#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace regbound {

// Base of every error thrown by the library.
class error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class invalid_argument : public error
{
public:
    using error::error;
};

// A value that should have been nonnegative came out clearly negative.
class internal_consistency_error : public error
{
public:
    using error::error;
};

class not_symmetric : public error
{
public:
    explicit not_symmetric(double label)
        : error("conditional is not symmetric: no mirror atom for label " + std::to_string(label)), label_(label)
    {}

    double label() const noexcept { return label_; }

private:
    double label_;
};

class missing_prediction : public error
{
public:
    explicit missing_prediction(const std::string& input_id)
        : error("hypothesis has no prediction for input '" + input_id + "'"), input_id_(input_id)
    {}

    const std::string& input_id() const noexcept { return input_id_; }

private:
    std::string input_id_;
};

class invalid_spec : public error
{
public:
    using error::error;
};

// p_min is zero, so the bound does not apply (negative-result regime).
class bound_inapplicable : public error
{
public:
    using error::error;
};

class premise_failed : public error
{
public:
    premise_failed(const std::string& input_id, double lhs, double rhs)
        : error("per-input premise fails at '" + input_id + "': " + std::to_string(lhs) + " > " + std::to_string(rhs))
        , input_id_(input_id)
    {}

    const std::string& input_id() const noexcept { return input_id_; }

private:
    std::string input_id_;
};

class domain_violation : public error
{
public:
    using error::error;
};

class invalid_params : public error
{
public:
    using error::error;
};

class non_convergence : public error
{
public:
    non_convergence(const std::string& what, std::vector<double> trace) : error(what), trace_(std::move(trace)) {}

    // Objective values recorded during the run, oldest first.
    const std::vector<double>& trace() const noexcept { return trace_; }

private:
    std::vector<double> trace_;
};

class config_infeasible : public error
{
public:
    using error::error;
};

class parse_error : public error
{
public:
    using error::error;
};

class dimension_mismatch : public error
{
public:
    using error::error;
};

} // namespace regbound

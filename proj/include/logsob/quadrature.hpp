#pragma once

#include <functional>

#include "logsob/common.hpp"

namespace logsob::quad {

struct Result {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
};

struct Options {
    double rel_tol = 1e-8;
    double abs_tol = 0.0;
    long max_evaluations = 4'000'000;
    int max_depth = 48;
};

// Adaptive Simpson on [a, b]. Deterministic: the recursion order is a fixed
// function of the inputs, never of scheduling.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opt = {});

// Convenience wrapper returning only the value.
double integrate_value(const std::function<double(double)>& f, double a, double b,
                       const Options& opt = {});

}  // namespace logsob::quad

#pragma once

#include <string>

#include "chns/manufactured.hpp"

namespace chns {

enum class ErrorNorm { L2, H1_semi };

struct ScalarExact {
    std::function<double(double, double)> value;
    std::function<Vec2(double, double)> gradient; // needed for H1_semi only
};

struct VectorExact {
    std::function<Vec2(double, double)> value;
    std::function<void(double, double, double (&)[2][2])> gradient;
};

/// Quadrature-evaluated ||field - exact|| with a degree-5 rule.
double error_norm(const Mesh& mesh, const Field& field, const ScalarExact& exact,
                  ErrorNorm norm);
double error_norm(const Mesh& mesh, const Field& field, const VectorExact& exact,
                  ErrorNorm norm);

/// Errors and pairwise rates across a refinement sequence. Six tracked
/// quantities: max-in-time L2 errors for phi and u, time-accumulated L2
/// errors for mu and p, max-in-time H1-seminorm error for u, and the
/// max deviation of the auxiliary variable from its reference value.
struct RateTable {
    std::vector<double> h;                   // one per resolution
    std::vector<std::string> norms;          // row group labels
    std::vector<std::vector<double>> errors; // [norm][resolution]
    std::vector<std::vector<double>> rates;  // [norm][resolution], first entry NaN
    std::string error;                       // nonempty if the study aborted early

    int completed() const { return static_cast<int>(h.size()); }
};

/// Runs the forced scheme on [0,1]^2 at each resolution n (h = 1/n) with
/// tau = h^3 adjusted so the final time is hit exactly.
RateTable convergence_study(const std::vector<int>& n_list, const SchemeParams& base,
                            double T);

std::string format_rate_table(const RateTable& table);
std::string rate_table_csv(const RateTable& table);

} // namespace chns

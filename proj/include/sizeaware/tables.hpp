#pragma once

#include <vector>

#include "sizeaware/workload.hpp"

namespace sizeaware {

/// Tabulated F_k(x) = int_0^x t^k b(t) f(t) / (1 - rho(t))^2 dt for k in {0, 2, 4}
/// and G_d(x) = int_0^x t^d / (1 - rho(t)) dt for d in {0, 1}.
///
/// Between knots the tables use cubic Hermite interpolation with the exact
/// integrands as slopes. Atoms of a discrete law contribute jumps to F_k;
/// F() returns the left limit and F_le() the right limit.
class IntegralTables {
public:
    /// dist is the service-time law X (server time units).
    IntegralTables(double lambda, const JobSizeDistribution& dist, const HoldingCostModel& model,
                   std::size_t knots = 1024);

    /// Left limit, integral over [0, x).
    double F(int k, double x) const;
    /// Right limit, integral over [0, x].
    double F_le(int k, double x) const;
    /// Value at +inf.
    double F_total(int k) const;
    double G(int d, double x) const;

    /// rho(x-) and rho(x+).
    double rho_below(double x) const { return lambda_ * dist_.partial_moment(1, x); }
    double rho_at_or_below(double x) const { return lambda_ * dist_.partial_moment_le(1, x); }
    double rho() const { return rho_; }

    /// Exact integrands, exposed for diagnostics.
    double f_integrand(int k, double t) const;
    double g_integrand(int d, double t) const;

    const std::vector<double>& grid() const { return grid_; }

private:
    static int f_slot(int k);
    double hermite(const std::vector<double>& values, const std::vector<double>& slopes, std::size_t i,
                   double x) const;
    std::size_t segment(double x) const;

    double lambda_;
    JobSizeDistribution dist_;
    HoldingCostModel model_;
    double rho_ = 0.0;

    // Continuous law.
    std::vector<double> grid_;
    std::vector<double> fval_[3], fslope_[3];
    std::vector<double> gval_[2], gslope_[2];
    double cont_hi_ = 0.0;

    // Discrete law: jumps at each atom and rho just above it.
    struct AtomRow {
        double x;
        double jump[3];
        double rho_after;
        double g_at[2];
    };
    std::vector<AtomRow> atoms_;
};

}  // namespace sizeaware

#pragma once

#include "bivirus/analysis.hpp"
#include "bivirus/graph.hpp"

#include <memory>
#include <string>
#include <vector>

namespace bivirus {

enum class Region { R1, R2, R3, R4, R5, R6, Boundary };

const char* to_string(Region r);

/// Region of the (tau1, tau2) plane for a verdict:
/// R1 virus-free; R2/R3 one virus survives while the other is below its own
/// threshold; R5/R4 virus 1/2 wins although both are above their own
/// thresholds; R6 coexistence.
Region region_of(const TrichotomyVerdict& v);

struct Range {
    double lo;
    double hi;
};

/// `points` evenly spaced values covering [lo, hi].
std::vector<double> linspace(Range r, std::size_t points);

struct RegionCell {
    Region region;
    double lambda_g0;
    double lambda_h0;
    double lambda_u;
    double lambda_v;
};

struct RegionGrid {
    std::vector<double> tau1_axis;
    std::vector<double> tau2_axis;
    std::vector<RegionCell> cells;  // row-major: index j * tau1_axis.size() + i for (tau1_i, tau2_j)

    const RegionCell& at(std::size_t i, std::size_t j) const {
        return cells[j * tau1_axis.size() + i];
    }
};

struct SweepOptions {
    double eps = 1e-8;
    unsigned threads = 0;  // 0: hardware concurrency capped by BIVIRUS_THREADS
};

/// Linear-rate system with beta = tau and delta = 1 for each virus.
BiVirusSystem linear_system(std::shared_ptr<const Graph> a, std::shared_ptr<const Graph> b,
                            double tau1, double tau2);

/// Default axis range [0.5/lambda, 4/lambda] for a graph with spectral radius lambda.
Range default_range(double lambda);

/// Classifies every (tau1, tau2) cell of the grid. The single-virus fixed
/// points depend on one axis each and are computed once per axis value.
RegionGrid sweep_linear(std::shared_ptr<const Graph> a, std::shared_ptr<const Graph> b,
                        const std::vector<double>& tau1_axis, const std::vector<double>& tau2_axis,
                        SweepOptions opts = {});

struct CurvePoint {
    double tau2;
    double tau1_blue;  // 1 / lambda(S_{y*} A); 1/lambda(A) when y* = 0
    double tau1_red;   // root of tau2 * lambda(S_{x*(tau1)} B) = 1; NaN when tau2 lambda(B) < 1
};

class CurveError : public Error {
public:
    CurveError(const std::string& what, double lo, double hi) : Error(what), lo_(lo), hi_(hi) {}
    double lo() const { return lo_; }
    double hi() const { return hi_; }

private:
    double lo_;
    double hi_;
};

/// The two threshold curves of the linear model, evaluated on `tau2_axis`.
std::vector<CurvePoint> threshold_curves(std::shared_ptr<const Graph> a,
                                         std::shared_ptr<const Graph> b,
                                         const std::vector<double>& tau2_axis,
                                         double tol = 1e-8);

/// Worker count: `requested` if nonzero, else hardware concurrency; both capped
/// by the BIVIRUS_THREADS environment variable when set.
unsigned worker_count(unsigned requested = 0);

}  // namespace bivirus

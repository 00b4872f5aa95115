#include "copulasim/fit.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <thread>

#include "copulasim/bvn.hpp"

namespace copulasim {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

// Density of the standard bivariate normal at (x, y; r): the derivative of
// Phi2 with respect to r (Plackett's identity), which makes exact-mode
// gradients as cheap as one extra exp per pair.
double bvn_density(double x, double y, double r) {
    double om = 1.0 - r * r;
    double q = (x * x - 2.0 * r * x * y + y * y) / (2.0 * om);
    return std::exp(-q) / (kTwoPi * std::sqrt(om));
}

double sigmoid(double s) { return 1.0 / (1.0 + std::exp(-s)); }

struct CellData {
    PairSample sample;
    double weight = 0.0;
    double emp = 0.0;
};

struct Workspace {
    std::vector<CellData> cells;
    DealTerms terms;
    std::vector<AttributeVector> profiles;  // distinct attribute vectors
    int rank = kNumAttributes;
    Phi2Mode mode = Phi2Mode::Exact;
    double clamp_eps = 0.01;
    double penalty_weight = 10.0;
    int threads = 1;
};

// Optimization vector: x[0] = logit(alpha0), then L row-major (12 x rank).
struct Theta {
    double alpha0;
    Matrix12 L;     // columns beyond rank stay zero
    Matrix12 sigma; // L L'
};

Theta unpack(const std::vector<double>& x, int rank) {
    Theta th;
    th.alpha0 = sigmoid(x[0]);
    for (int r = 0; r < kNumAttributes; ++r)
        for (int k = 0; k < rank; ++k)
            th.L(r, k) = x[1 + static_cast<std::size_t>(r * rank + k)];
    for (int r = 0; r < kNumAttributes; ++r)
        for (int c = 0; c < kNumAttributes; ++c) {
            double s = 0.0;
            for (int k = 0; k < rank; ++k) s += th.L(r, k) * th.L(c, k);
            th.sigma(r, c) = s;
        }
    return th;
}

double max_profile_kernel(const Workspace& ws, const Theta& th) {
    double m = 0.0;
    double a2 = th.alpha0 * th.alpha0;
    for (const auto& e : ws.profiles) m = std::max(m, a2 + quad_form(e, th.sigma, e));
    return m;
}

// One cell's contribution: J_model, and optionally the gradient of J_model
// with respect to Sigma entries (unsymmetrized outer-product accumulation)
// and alpha0^2.
struct CellEval {
    double jmodel = 0.0;
    Matrix12 dsigma;
    double dalpha2 = 0.0;
};

CellEval eval_cell(const Workspace& ws, const CellData& cd, const Theta& th, bool want_grad) {
    CellEval out;
    const double limit = 1.0 - ws.clamp_eps;
    const double a2 = th.alpha0 * th.alpha0;
    const double invK = 1.0 / static_cast<double>(cd.sample.pairs.size());
    for (auto [i, j] : cd.sample.pairs) {
        const AttributeVector& ei = ws.terms.e[i];
        const AttributeVector& ej = ws.terms.e[j];
        double r = a2 + quad_form(ei, th.sigma, ej);
        bool clamped = r > limit || r < -limit;
        if (clamped) r = std::clamp(r, -limit, limit);
        double deriv = 0.0;
        if (ws.mode == Phi2Mode::Exact) {
            out.jmodel += bvn_cdf(ws.terms.t[i], ws.terms.t[j], LatentCorrelation(r)).value();
            if (want_grad && !clamped) deriv = bvn_density(ws.terms.t[i], ws.terms.t[j], r);
        } else {
            double raw = ws.terms.cdf_t[i] * ws.terms.cdf_t[j] +
                         r * ws.terms.pdf_t[i] * ws.terms.pdf_t[j];
            out.jmodel += std::clamp(raw, 0.0, 1.0);
            if (want_grad && !clamped && raw > 0.0 && raw < 1.0)
                deriv = ws.terms.pdf_t[i] * ws.terms.pdf_t[j];
        }
        if (want_grad && deriv != 0.0) {
            double d = deriv * invK;
            for (int a : ei.active())
                for (int b : ej.active()) out.dsigma(a, b) += d;
            out.dalpha2 += d;
        }
    }
    out.jmodel *= invK;
    return out;
}

// Objective and (optionally) its gradient in the optimization vector.
// Cell contributions are stored per cell and reduced in cell order, so the
// value is identical for any thread count.
double eval_objective(const Workspace& ws, const std::vector<double>& x, int rank,
                      std::vector<double>* grad) {
    Theta th = unpack(x, rank);
    const bool want_grad = grad != nullptr;
    std::vector<CellEval> evals(ws.cells.size());

    auto run = [&](std::size_t begin, std::size_t end) {
        for (std::size_t c = begin; c < end; ++c)
            if (ws.cells[c].weight > 0.0)
                evals[c] = eval_cell(ws, ws.cells[c], th, want_grad);
    };
    if (ws.threads > 1 && ws.cells.size() > 1) {
        std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(ws.threads), ws.cells.size());
        std::vector<std::thread> pool;
        std::size_t chunk = (ws.cells.size() + nt - 1) / nt;
        for (std::size_t t = 0; t < nt; ++t) {
            std::size_t b = t * chunk;
            std::size_t e = std::min(ws.cells.size(), b + chunk);
            if (b < e) pool.emplace_back(run, b, e);
        }
        for (auto& th2 : pool) th2.join();
    } else {
        run(0, ws.cells.size());
    }

    double obj = 0.0;
    Matrix12 gsigma;
    double galpha2 = 0.0;
    for (std::size_t c = 0; c < ws.cells.size(); ++c) {
        const CellData& cd = ws.cells[c];
        if (cd.weight == 0.0) continue;
        double resid = cd.emp - evals[c].jmodel;
        obj += cd.weight * resid * resid;
        if (want_grad) {
            double coef = -2.0 * cd.weight * resid;
            for (int a = 0; a < kNumAttributes; ++a)
                for (int b = 0; b < kNumAttributes; ++b)
                    gsigma(a, b) += coef * evals[c].dsigma(a, b);
            galpha2 += coef * evals[c].dalpha2;
        }
    }

    // smooth hinge pushing every profile kernel below 1 - clamp_eps
    const double limit = 1.0 - ws.clamp_eps;
    const double a2 = th.alpha0 * th.alpha0;
    for (const auto& e : ws.profiles) {
        double k = a2 + quad_form(e, th.sigma, e);
        double over = k - limit;
        if (over > 0.0) {
            obj += ws.penalty_weight * over * over;
            if (want_grad) {
                double coef = 2.0 * ws.penalty_weight * over;
                for (int a : e.active())
                    for (int b : e.active()) gsigma(a, b) += coef;
                galpha2 += coef;
            }
        }
    }

    if (want_grad) {
        std::fill(grad->begin(), grad->end(), 0.0);
        // dObj/dL = (G + G') L
        for (int r = 0; r < kNumAttributes; ++r)
            for (int k = 0; k < rank; ++k) {
                double s = 0.0;
                for (int c = 0; c < kNumAttributes; ++c)
                    s += (gsigma(r, c) + gsigma(c, r)) * th.L(c, k);
                (*grad)[1 + static_cast<std::size_t>(r * rank + k)] = s;
            }
        // chain through alpha0 = sigmoid(s): d(alpha0^2)/ds = 2 a0 a0(1-a0)
        (*grad)[0] = galpha2 * 2.0 * th.alpha0 * th.alpha0 * (1.0 - th.alpha0);
    }
    return obj;
}

double eval_fd(const Workspace& ws, std::vector<double> x, int rank, std::vector<double>* grad) {
    double f0 = eval_objective(ws, x, rank, nullptr);
    for (std::size_t i = 0; i < x.size(); ++i) {
        double h = 1e-6 * std::max(1.0, std::fabs(x[i]));
        double xi = x[i];
        x[i] = xi + h;
        double f1 = eval_objective(ws, x, rank, nullptr);
        x[i] = xi;
        (*grad)[i] = (f1 - f0) / h;
    }
    return f0;
}

}  // namespace

JointProbTable build_empirical_table(const std::vector<Deal>& deals,
                                     const OutcomeMatrix& outcomes, int K,
                                     std::uint64_t seed) {
    JointProbTable t;
    for (int u = 0; u < kNumAttributes; ++u)
        for (int v = u; v < kNumAttributes; ++v) {
            double val = 0.0;
            try {
                PairSample s = sample_pairs(deals, u, v, K, seed);
                val = empirical_joint(s, outcomes);
            } catch (const empty_cell_error&) {
            }
            t(u, v) = t(v, u) = val;
        }
    return t;
}

JointProbTable build_model_table(const std::vector<Deal>& deals, const ModelParams& params,
                                 int K, std::uint64_t seed, Phi2Mode mode, double clamp_eps,
                                 std::int64_t* clamp_events) {
    JointProbTable t;
    DealTerms terms = make_deal_terms(deals);
    for (int u = 0; u < kNumAttributes; ++u)
        for (int v = u; v < kNumAttributes; ++v) {
            double val = 0.0;
            try {
                PairSample s = sample_pairs(deals, u, v, K, seed);
                val = model_joint(s, terms, params.alpha0(), params.sigma(), mode, clamp_eps,
                                  clamp_events);
            } catch (const empty_cell_error&) {
            }
            t(u, v) = t(v, u) = val;
        }
    return t;
}

FitReport fit(const std::vector<Deal>& deals, const OutcomeMatrix& outcomes,
              const FitConfig& config) {
    Workspace ws;
    ws.terms = make_deal_terms(deals);
    ws.mode = config.phi2_mode;
    ws.clamp_eps = config.clamp_eps;
    ws.penalty_weight = config.penalty_weight;
    ws.threads = config.threads > 0 ? config.threads : 1;

    std::map<std::uint16_t, AttributeVector> prof;
    for (const auto& e : ws.terms.e) prof.emplace(e.bits(), e);
    for (const auto& [bits, e] : prof) ws.profiles.push_back(e);

    for (int u = 0; u < kNumAttributes; ++u)
        for (int v = u; v < kNumAttributes; ++v) {
            CellData cd;
            try {
                cd.sample = sample_pairs(deals, u, v, config.pairs_per_cell, config.seed);
                cd.weight = config.weights == WeightScheme::Uniform
                                ? 1.0
                                : static_cast<double>(std::min<std::int64_t>(
                                      cd.sample.eligible, config.pairs_per_cell)) /
                                      static_cast<double>(config.pairs_per_cell);
                cd.emp = empirical_joint(cd.sample, outcomes);
            } catch (const empty_cell_error&) {
                cd.sample.u = u;
                cd.sample.v = v;
                cd.weight = 0.0;
            }
            ws.cells.push_back(std::move(cd));
        }

    const int rank = config.rank;
    const std::size_t dim = 1 + static_cast<std::size_t>(kNumAttributes * rank);
    std::vector<double> x(dim, 0.0);
    x[0] = std::log(0.1 / 0.9);  // alpha0 = 0.1
    for (int r = 0; r < std::min(kNumAttributes, rank); ++r)
        x[1 + static_cast<std::size_t>(r * rank + r)] = 0.05;

    // infeasible start shrinks L until every profile kernel is inside the box
    for (int tries = 0; tries < 64; ++tries) {
        Theta th = unpack(x, rank);
        if (max_profile_kernel(ws, th) < 1.0 - config.clamp_eps) break;
        for (std::size_t i = 1; i < dim; ++i) x[i] *= 0.5;
    }

    auto evaluate = [&](const std::vector<double>& xx, std::vector<double>* g) {
        return config.gradient == GradientMode::Analytic
                   ? eval_objective(ws, xx, rank, g)
                   : (g ? eval_fd(ws, xx, rank, g) : eval_objective(ws, xx, rank, nullptr));
    };

    std::vector<double> grad(dim), prev_x, prev_grad;
    double f = evaluate(x, &grad);
    double step = 0.01;
    std::deque<double> window{f};
    int iter = 0;
    bool converged = false;

    for (; iter < config.max_iters; ++iter) {
        double gnorm2 = 0.0;
        for (double g : grad) gnorm2 += g * g;
        if (gnorm2 < 1e-24) {
            converged = true;
            break;
        }
        // Barzilai-Borwein step from the previous accepted move
        if (!prev_x.empty()) {
            double sy = 0.0, ss = 0.0;
            for (std::size_t i = 0; i < dim; ++i) {
                double si = x[i] - prev_x[i];
                double yi = grad[i] - prev_grad[i];
                sy += si * yi;
                ss += si * si;
            }
            if (sy > 1e-300) step = std::clamp(ss / sy, 1e-8, 1e3);
        }
        std::vector<double> xn(dim);
        double fn = f;
        double t = step;
        bool accepted = false;
        for (int bt = 0; bt < 50; ++bt) {
            for (std::size_t i = 0; i < dim; ++i) xn[i] = x[i] - t * grad[i];
            fn = evaluate(xn, nullptr);
            if (fn <= f - 1e-4 * t * gnorm2) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            converged = true;  // no descent direction progress left
            break;
        }
        prev_x = x;
        prev_grad = grad;
        x = xn;
        f = fn;
        evaluate(x, &grad);
        window.push_back(f);
        if (window.size() > 21) window.pop_front();
        if (window.size() == 21) {
            double drop = (window.front() - f) / std::max(std::fabs(window.front()), 1e-300);
            if (drop < config.tol) {
                converged = true;
                break;
            }
        }
    }

    Theta th = unpack(x, rank);
    // hard feasibility projection: scale the whole kernel into the box
    double kmax = max_profile_kernel(ws, th);
    double limit = 1.0 - config.clamp_eps;
    if (kmax > limit) {
        double scale = std::sqrt(limit / kmax);
        for (std::size_t i = 1; i < dim; ++i) x[i] *= scale;
        x[0] += 2.0 * std::log(scale);  // shrinks sigmoid(x0) roughly by `scale`
        th = unpack(x, rank);
        if (max_profile_kernel(ws, th) > limit) {
            // alpha0 tail correction if the logit shift was not enough
            while (max_profile_kernel(ws, th) > limit && th.alpha0 > 1e-12) {
                x[0] -= 1.0;
                th = unpack(x, rank);
            }
        }
        f = evaluate(x, nullptr);
    }

    FitReport rep;
    rep.alpha0 = th.alpha0;
    rep.factor = th.L;
    rep.sigma = th.sigma;
    rep.objective_value = f;
    rep.iterations = iter;
    rep.converged = converged;
    rep.max_kernel = max_profile_kernel(ws, th);

    for (const auto& cd : ws.cells) {
        double mod = 0.0;
        if (cd.weight > 0.0)
            mod = model_joint(cd.sample, ws.terms, th.alpha0, th.sigma, ws.mode,
                              ws.clamp_eps, &rep.clamp_events);
        rep.empirical(cd.sample.u, cd.sample.v) = rep.empirical(cd.sample.v, cd.sample.u) = cd.emp;
        rep.model(cd.sample.u, cd.sample.v) = rep.model(cd.sample.v, cd.sample.u) = mod;
        double r = cd.emp - mod;
        rep.residual(cd.sample.u, cd.sample.v) = rep.residual(cd.sample.v, cd.sample.u) = r;
    }
    auto [mse, rmse] = fit_metrics(rep.empirical, rep.model, config.mse_cells);
    rep.mse = mse;
    rep.rmse = rmse;
    return rep;
}

}  // namespace copulasim

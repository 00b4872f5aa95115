#include "copulasim/joint.hpp"

#include <algorithm>
#include <cmath>

#include "copulasim/bvn.hpp"

namespace copulasim {

double empirical_joint(const PairSample& sample, const OutcomeMatrix& outcomes) {
    if (sample.pairs.empty()) return 0.0;
    double s = 0.0;
    for (auto [i, j] : sample.pairs) {
        if (i >= outcomes.deal_count() || j >= outcomes.deal_count())
            throw std::runtime_error("empirical_joint: pair references a deal without outcomes");
        s += outcomes.pair_mean(i, j);
    }
    return s / static_cast<double>(sample.pairs.size());
}

DealTerms make_deal_terms(const std::vector<Deal>& deals) {
    DealTerms d;
    d.e.reserve(deals.size());
    d.t.reserve(deals.size());
    d.cdf_t.reserve(deals.size());
    d.pdf_t.reserve(deals.size());
    for (const Deal& deal : deals) {
        d.e.push_back(encode(deal));
        double t = std_normal_quantile(deal.p);
        d.t.push_back(t);
        d.cdf_t.push_back(deal.p.value());
        d.pdf_t.push_back(std_normal_pdf(t));
    }
    return d;
}

double model_joint(const PairSample& sample, const DealTerms& terms, double alpha0,
                   const Matrix12& sigma, Phi2Mode mode, double clamp_eps,
                   std::int64_t* clamp_events) {
    if (sample.pairs.empty()) return 0.0;
    const double limit = 1.0 - clamp_eps;
    const double a2 = alpha0 * alpha0;
    double s = 0.0;
    for (auto [i, j] : sample.pairs) {
        double r = a2 + quad_form(terms.e[i], sigma, terms.e[j]);
        if (r > limit || r < -limit) {
            r = std::clamp(r, -limit, limit);
            if (clamp_events) ++*clamp_events;
        }
        if (mode == Phi2Mode::Exact)
            s += bvn_cdf(terms.t[i], terms.t[j], LatentCorrelation(r)).value();
        else
            s += std::clamp(terms.cdf_t[i] * terms.cdf_t[j] + r * terms.pdf_t[i] * terms.pdf_t[j],
                            0.0, 1.0);
    }
    return s / static_cast<double>(sample.pairs.size());
}

std::vector<double> cell_weights(const std::vector<PairSample>& samples, int K,
                                 WeightScheme scheme) {
    std::vector<double> w;
    w.reserve(samples.size());
    for (const PairSample& s : samples) {
        if (s.pairs.empty()) {
            w.push_back(0.0);
        } else if (scheme == WeightScheme::Uniform) {
            w.push_back(1.0);
        } else {
            w.push_back(static_cast<double>(std::min<std::int64_t>(s.eligible, K)) /
                        static_cast<double>(K));
        }
    }
    return w;
}

double objective(const ModelParams& theta, const std::vector<PairSample>& samples,
                 const std::vector<double>& weights, const OutcomeMatrix& outcomes,
                 const DealTerms& terms, Phi2Mode mode, double clamp_eps) {
    double obj = 0.0;
    for (std::size_t c = 0; c < samples.size(); ++c) {
        if (weights[c] == 0.0) continue;
        double emp = empirical_joint(samples[c], outcomes);
        double mod = model_joint(samples[c], terms, theta.alpha0(), theta.sigma(), mode,
                                 clamp_eps);
        double r = emp - mod;
        obj += weights[c] * r * r;
    }
    return obj;
}

std::pair<double, double> fit_metrics(const JointProbTable& empirical,
                                      const JointProbTable& model, MseCells cells) {
    double sse = 0.0;
    int n = 0;
    for (int u = 0; u < kNumAttributes; ++u) {
        int v0 = cells == MseCells::Directed ? 0 : u;
        for (int v = v0; v < kNumAttributes; ++v) {
            double r = empirical(u, v) - model(u, v);
            sse += r * r;
            ++n;
        }
    }
    double mse = sse / n;
    return {mse, std::sqrt(mse)};
}

}  // namespace copulasim

#include "copulasim/params.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "copulasim/errors.hpp"

namespace copulasim {

bool Matrix12::is_symmetric(double tol) const {
    for (int r = 0; r < kNumAttributes; ++r)
        for (int c = r + 1; c < kNumAttributes; ++c)
            if (std::fabs((*this)(r, c) - (*this)(c, r)) > tol) return false;
    return true;
}

Matrix12 Matrix12::transpose() const {
    Matrix12 t;
    for (int r = 0; r < kNumAttributes; ++r)
        for (int c = 0; c < kNumAttributes; ++c) t(c, r) = (*this)(r, c);
    return t;
}

Matrix12 Matrix12::identity() {
    Matrix12 m;
    for (int i = 0; i < kNumAttributes; ++i) m(i, i) = 1.0;
    return m;
}

double quad_form(const AttributeVector& ei, const Matrix12& m, const AttributeVector& ej) {
    double s = 0.0;
    for (int r = 0; r < kNumAttributes; ++r) {
        if (!ei.bit(r)) continue;
        for (int c = 0; c < kNumAttributes; ++c)
            if (ej.bit(c)) s += m(r, c);
    }
    return s;
}

void symmetric_eigen(const Matrix12& m, std::array<double, kNumAttributes>& values,
                     Matrix12& vectors) {
    constexpr int n = kNumAttributes;
    Matrix12 a = m;
    vectors = Matrix12::identity();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double apq = a(p, q);
                if (std::fabs(apq) < 1e-300) continue;
                double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    double vkp = vectors(k, p), vkq = vectors(k, q);
                    vectors(k, p) = c * vkp - s * vkq;
                    vectors(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    std::array<int, n> order;
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int x, int y) { return a(x, x) < a(y, y); });
    Matrix12 sorted;
    for (int i = 0; i < n; ++i) {
        values[i] = a(order[i], order[i]);
        for (int k = 0; k < n; ++k) sorted(k, i) = vectors(k, order[i]);
    }
    vectors = sorted;
}

BlockView block_view(Block b) {
    auto range = [](int group) -> std::pair<int, int> {
        if (group == 0) return {0, 2};
        if (group == 1) return {2, 6};
        return {6, 12};
    };
    int rb = static_cast<int>(b) / 3;
    int cb = static_cast<int>(b) % 3;
    auto [r0, r1] = range(rb);
    auto [c0, c1] = range(cb);
    return {r0, r1, c0, c1};
}

ModelParams ModelParams::from_factor(double alpha0, const Matrix12& L, int rank) {
    if (!(alpha0 >= 0.0 && alpha0 < 1.0))
        throw std::domain_error("alpha0 must lie in [0,1)");
    if (rank < 1 || rank > kNumAttributes) throw std::domain_error("rank must be in 1..12");
    ModelParams p;
    p.alpha0_ = alpha0;
    p.factor_ = L;
    p.rank_ = rank;
    for (int r = 0; r < kNumAttributes; ++r)
        for (int c = 0; c < kNumAttributes; ++c) {
            double s = 0.0;
            for (int k = 0; k < rank; ++k) s += L(r, k) * L(c, k);
            p.sigma_(r, c) = s;
        }
    return p;
}

ModelParams ModelParams::from_covariance(double alpha0, const Matrix12& sigma) {
    if (!(alpha0 >= 0.0 && alpha0 < 1.0))
        throw std::domain_error("alpha0 must lie in [0,1)");
    if (!sigma.is_symmetric(1e-12))
        throw inconsistent_tables_error("covariance table is not symmetric");
    std::array<double, kNumAttributes> vals;
    Matrix12 vecs;
    symmetric_eigen(sigma, vals, vecs);
    Matrix12 L;
    for (int c = 0; c < kNumAttributes; ++c) {
        double lam = std::max(vals[c], 0.0);
        double s = std::sqrt(lam);
        for (int r = 0; r < kNumAttributes; ++r) L(r, c) = vecs(r, c) * s;
    }
    ModelParams p;
    p.alpha0_ = alpha0;
    p.sigma_ = sigma;
    p.factor_ = L;
    p.rank_ = kNumAttributes;
    double adj = 0.0;
    for (int r = 0; r < kNumAttributes; ++r)
        for (int c = 0; c < kNumAttributes; ++c) {
            double s = 0.0;
            for (int k = 0; k < kNumAttributes; ++k) s += L(r, k) * L(c, k);
            adj = std::max(adj, std::fabs(s - sigma(r, c)));
        }
    p.psd_adjustment_ = adj;
    return p;
}

double latent_covariance(const AttributeVector& ei, const AttributeVector& ej,
                         const ModelParams& params) {
    return params.alpha0() * params.alpha0() + quad_form(ei, params.sigma(), ej);
}

double idiosyncratic_variance(const AttributeVector& e, const ModelParams& params) {
    double k = latent_covariance(e, e, params);
    double phi2 = 1.0 - k;
    if (phi2 <= 0.0) {
        std::ostringstream os;
        os << "idiosyncratic variance nonpositive (kernel " << k << ") for attributes {";
        bool first = true;
        for (int i : e.active()) {
            if (!first) os << ", ";
            os << kAttributeLabels[static_cast<std::size_t>(i)];
            first = false;
        }
        os << "}";
        throw infeasible_variance_error(os.str());
    }
    return phi2;
}

double bernoulli_correlation(Probability pi, Probability pj, LatentCorrelation r) {
    double a = pi.value(), b = pj.value();
    if (a <= 0.0 || a >= 1.0 || b <= 0.0 || b >= 1.0)
        throw std::domain_error("bernoulli_correlation: degenerate marginal probability");
    double ti = std_normal_quantile(pi);
    double tj = std_normal_quantile(pj);
    double joint = bvn_cdf(ti, tj, r);
    return (joint - a * b) / std::sqrt(a * (1.0 - a) * b * (1.0 - b));
}

std::vector<double> sigma_block(const ModelParams& params, Block b) {
    BlockView v = block_view(b);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>((v.row_end - v.row_begin) * (v.col_end - v.col_begin)));
    for (int r = v.row_begin; r < v.row_end; ++r)
        for (int c = v.col_begin; c < v.col_end; ++c) out.push_back(params.sigma()(r, c));
    return out;
}

}  // namespace copulasim

#include "copulasim/tables.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "copulasim/errors.hpp"

namespace copulasim {

namespace {

bool exclusive_cell(int u, int v) {
    if (u == v) return false;
    bool founder = u < 2 && v < 2;
    bool geo = u >= 2 && u < 6 && v >= 2 && v < 6;
    return founder || geo;
}

std::string cell_name(int u, int v) {
    return kAttributeLabels[static_cast<std::size_t>(u)] + "x" +
           kAttributeLabels[static_cast<std::size_t>(v)];
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

void MarginalCounts::validate() const {
    for (int u = 0; u < kNumAttributes; ++u)
        if (n[u] < 0)
            throw inconsistent_tables_error("negative marginal count for " +
                                            kAttributeLabels[static_cast<std::size_t>(u)]);
    std::int64_t founders = n[0] + n[1];
    std::int64_t geos = n[2] + n[3] + n[4] + n[5];
    if (founders != geos)
        throw inconsistent_tables_error(
            "founder counts sum to " + std::to_string(founders) +
            " but geography counts sum to " + std::to_string(geos));
}

void PairCountTable::validate(const MarginalCounts& m) const {
    for (int u = 0; u < kNumAttributes; ++u) {
        if ((*this)(u, u) != m.n[u] * (m.n[u] - 1))
            throw inconsistent_tables_error("pair-count diagonal for " +
                                            kAttributeLabels[static_cast<std::size_t>(u)] +
                                            " does not equal n(n-1)");
        for (int v = 0; v < kNumAttributes; ++v) {
            if ((*this)(u, v) != (*this)(v, u))
                throw inconsistent_tables_error("pair-count table asymmetric at " +
                                                cell_name(u, v));
            if ((*this)(u, v) < 0)
                throw inconsistent_tables_error("negative pair count at " + cell_name(u, v));
        }
    }
}

CooccurrenceMatrix derive_cooccurrence(const MarginalCounts& marginals,
                                       const PairCountTable& pairs) {
    marginals.validate();
    pairs.validate(marginals);
    CooccurrenceMatrix out;
    for (int u = 0; u < kNumAttributes; ++u) {
        out(u, u) = marginals.n[u];
        for (int v = 0; v < kNumAttributes; ++v) {
            if (u == v) continue;
            std::int64_t nuv = marginals.n[u] * marginals.n[v] - pairs(u, v);
            if (nuv < 0)
                throw inconsistent_tables_error("derived co-occurrence negative at " +
                                                cell_name(u, v));
            if (nuv > std::min(marginals.n[u], marginals.n[v]))
                throw inconsistent_tables_error("derived co-occurrence at " + cell_name(u, v) +
                                                " exceeds min marginal");
            if (exclusive_cell(u, v) && nuv != 0)
                throw inconsistent_tables_error("mutually exclusive attributes co-occur at " +
                                                cell_name(u, v));
            out(u, v) = nuv;
        }
    }
    // Every deal carries exactly one founder and one geography, so each
    // attribute row must sum to its marginal within those groups.
    for (int u = 0; u < kNumAttributes; ++u) {
        std::int64_t fsum = out(u, 0) + out(u, 1);
        std::int64_t gsum = out(u, 2) + out(u, 3) + out(u, 4) + out(u, 5);
        if (fsum != marginals.n[u])
            throw inconsistent_tables_error("founder co-occurrence row for " +
                                            kAttributeLabels[static_cast<std::size_t>(u)] +
                                            " does not sum to its marginal");
        if (gsum != marginals.n[u])
            throw inconsistent_tables_error("geography co-occurrence row for " +
                                            kAttributeLabels[static_cast<std::size_t>(u)] +
                                            " does not sum to its marginal");
    }
    return out;
}

namespace {

std::vector<std::string> read_header(std::istream& in, const std::string& path) {
    std::string line;
    if (!std::getline(in, line)) throw parse_error("empty fixture file " + path, 1);
    auto cells = split_csv(line);
    std::vector<std::string> expect(kAttributeLabels.begin(), kAttributeLabels.end());
    std::vector<std::string> got(cells.end() - std::min<std::size_t>(cells.size(), 12),
                                 cells.end());
    if (got != expect)
        throw parse_error("fixture header must list the 12 attribute labels in order", 1);
    return cells;
}

}  // namespace

MarginalCounts load_marginals(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open marginals file: " + path);
    read_header(in, path);
    std::string line;
    if (!std::getline(in, line)) throw parse_error("missing marginals row", 2);
    auto cells = split_csv(line);
    if (cells.size() < 12) throw parse_error("marginals row needs 12 integers", 2);
    MarginalCounts m;
    std::size_t off = cells.size() - 12;
    for (int u = 0; u < kNumAttributes; ++u)
        m.n[u] = std::stoll(cells[off + static_cast<std::size_t>(u)]);
    m.validate();
    return m;
}

PairCountTable load_pair_counts(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open pair-count file: " + path);
    read_header(in, path);
    PairCountTable t;
    std::string line;
    for (int u = 0; u < kNumAttributes; ++u) {
        if (!std::getline(in, line))
            throw parse_error("pair-count table needs 12 rows", static_cast<std::size_t>(u) + 2);
        auto cells = split_csv(line);
        if (cells.size() < 13 ||
            cells[0] != kAttributeLabels[static_cast<std::size_t>(u)])
            throw parse_error("pair-count row must start with " +
                                  kAttributeLabels[static_cast<std::size_t>(u)],
                              static_cast<std::size_t>(u) + 2);
        for (int v = 0; v < kNumAttributes; ++v)
            t(u, v) = std::stoll(cells[static_cast<std::size_t>(v) + 1]);
    }
    for (int u = 0; u < kNumAttributes; ++u)
        for (int v = 0; v < kNumAttributes; ++v)
            if (t(u, v) != t(v, u))
                throw inconsistent_tables_error("pair-count file asymmetric at " +
                                                cell_name(u, v));
    return t;
}

void save_marginals(const MarginalCounts& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write marginals file: " + path);
    for (int u = 0; u < kNumAttributes; ++u)
        out << (u ? "," : "") << kAttributeLabels[static_cast<std::size_t>(u)];
    out << "\n";
    for (int u = 0; u < kNumAttributes; ++u) out << (u ? "," : "") << m.n[u];
    out << "\n";
}

void save_pair_counts(const PairCountTable& t, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write pair-count file: " + path);
    out << "label";
    for (int u = 0; u < kNumAttributes; ++u)
        out << "," << kAttributeLabels[static_cast<std::size_t>(u)];
    out << "\n";
    for (int u = 0; u < kNumAttributes; ++u) {
        out << kAttributeLabels[static_cast<std::size_t>(u)];
        for (int v = 0; v < kNumAttributes; ++v) out << "," << t(u, v);
        out << "\n";
    }
}

}  // namespace copulasim

#include "copulasim/fixtures.hpp"

#include <fstream>

#include "copulasim/errors.hpp"

namespace copulasim::fixtures {

namespace {

constexpr std::int64_t kMarginals[12] = {8833, 422,  3003, 1306, 4845, 101,
                                         4162, 1986, 883,  4294, 120,  2108};

constexpr std::int64_t kPairs[12][12] = {
    {78013056, 3727526, 26522684, 11534649, 42791213, 892036, 36759003, 17540457, 7798712,
     37924781, 1059852, 18617927},
    {3727526, 177662, 1267078, 551075, 2044417, 42618, 1756145, 837987, 372570, 1811895,
     50628, 889505},
    {26522684, 1267078, 9015006, 3921918, 14549535, 303303, 12497028, 5963262, 2651387,
     12893380, 360287, 6329762},
    {11534649, 551075, 3921918, 1704330, 6327570, 131906, 5435051, 2593413, 1153035,
     5607295, 156713, 2752830},
    {42791213, 2044417, 14549535, 6327570, 23469180, 489345, 20162754, 9621200, 4277690,
     20802356, 581360, 10211947},
    {892036, 42618, 303303, 131906, 489345, 10100, 420315, 200569, 89170, 433645, 12120,
     212893},
    {36759003, 1756145, 12497028, 5435051, 20162754, 420315, 17318082, 8264816, 3674772,
     17870126, 499344, 8773160},
    {17540457, 837987, 5963262, 2593413, 9621200, 200569, 8264816, 3942210, 1753403,
     8527006, 238299, 4186302},
    {7798712, 372570, 2651387, 1153035, 4277690, 89170, 3674772, 1753403, 778806, 3791367,
     105956, 1861341},
    {37924781, 1811895, 12893380, 5607295, 20802356, 433645, 17870126, 8527006, 3791367,
     18434142, 515229, 9051432},
    {1059852, 50628, 360287, 156713, 581360, 12120, 499344, 238299, 105956, 515229, 14280,
     252959},
    {18617927, 889505, 6329762, 2752830, 10211947, 212893, 8773160, 4186302, 1861341,
     9051432, 252959, 4441556}};

constexpr double kSigma[12][12] = {
    {0.0012, -0.0134, -0.0081, -0.0009, -0.0028, -0.0003, -0.0051, -0.0030, -0.0060,
     -0.0017, -0.0032, -0.0028},
    {-0.0134, 0.1950, 0.1171, 0.0152, 0.0398, 0.0055, 0.0809, 0.0440, 0.0877, 0.0279,
     0.0482, 0.0404},
    {-0.0081, 0.1171, 0.0713, 0.0090, 0.0239, 0.0036, 0.0489, 0.0259, 0.0523, 0.0172,
     0.0291, 0.0239},
    {-0.0009, 0.0152, 0.0090, 0.0015, 0.0031, 0.0005, 0.0066, 0.0035, 0.0069, 0.0023,
     0.0036, 0.0030},
    {-0.0028, 0.0398, 0.0239, 0.0031, 0.0082, 0.0011, 0.0165, 0.0090, 0.0179, 0.0056,
     0.0098, 0.0082},
    {-0.0003, 0.0055, 0.0036, 0.0005, 0.0011, 0.0003, 0.0026, 0.0012, 0.0024, 0.0010,
     0.0014, 0.0010},
    {-0.0051, 0.0809, 0.0489, 0.0066, 0.0165, 0.0026, 0.0347, 0.0183, 0.0363, 0.0121,
     0.0202, 0.0165},
    {-0.0030, 0.0440, 0.0259, 0.0035, 0.0090, 0.0012, 0.0183, 0.0107, 0.0201, 0.0059,
     0.0109, 0.0094},
    {-0.0060, 0.0877, 0.0523, 0.0069, 0.0179, 0.0024, 0.0363, 0.0201, 0.0397, 0.0124,
     0.0217, 0.0184},
    {-0.0017, 0.0279, 0.0172, 0.0023, 0.0056, 0.0010, 0.0121, 0.0059, 0.0124, 0.0045,
     0.0070, 0.0055},
    {-0.0032, 0.0482, 0.0291, 0.0036, 0.0098, 0.0014, 0.0202, 0.0109, 0.0217, 0.0070,
     0.0124, 0.0101},
    {-0.0028, 0.0404, 0.0239, 0.0030, 0.0082, 0.0010, 0.0165, 0.0094, 0.0184, 0.0055,
     0.0101, 0.0088}};

}  // namespace

MarginalCounts marginals() {
    MarginalCounts m;
    for (int u = 0; u < kNumAttributes; ++u) m.n[u] = kMarginals[u];
    return m;
}

PairCountTable pair_counts() {
    PairCountTable t;
    for (int u = 0; u < kNumAttributes; ++u)
        for (int v = 0; v < kNumAttributes; ++v) t(u, v) = kPairs[u][v];
    return t;
}

GeneratorTargets generator_targets() {
    GeneratorTargets t;
    t.hot_first = 5397;
    t.hot_repeat = 299;
    return t;
}

Matrix12 sigma_table() {
    Matrix12 s;
    for (int u = 0; u < kNumAttributes; ++u)
        for (int v = 0; v < kNumAttributes; ++v) s(u, v) = kSigma[u][v];
    return s;
}

ModelParams model_params() { return ModelParams::from_covariance(0.0, sigma_table()); }

Matrix12 load_sigma(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open covariance file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw parse_error("empty covariance file", 1);
    Matrix12 s;
    for (int u = 0; u < kNumAttributes; ++u) {
        if (!std::getline(in, line))
            throw parse_error("covariance table needs 12 rows", static_cast<std::size_t>(u) + 2);
        std::string cell;
        std::vector<std::string> cells;
        for (char ch : line) {
            if (ch == ',') {
                cells.push_back(cell);
                cell.clear();
            } else if (ch != '\r') {
                cell.push_back(ch);
            }
        }
        cells.push_back(cell);
        if (cells.size() < 13 || cells[0] != kAttributeLabels[static_cast<std::size_t>(u)])
            throw parse_error("covariance row must start with " +
                                  kAttributeLabels[static_cast<std::size_t>(u)],
                              static_cast<std::size_t>(u) + 2);
        for (int v = 0; v < kNumAttributes; ++v)
            s(u, v) = std::stod(cells[static_cast<std::size_t>(v) + 1]);
    }
    if (!s.is_symmetric(1e-12))
        throw inconsistent_tables_error("covariance file is not symmetric");
    return s;
}

void save_sigma(const Matrix12& sigma, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write covariance file: " + path);
    out << "label";
    for (int u = 0; u < kNumAttributes; ++u)
        out << "," << kAttributeLabels[static_cast<std::size_t>(u)];
    out << "\n";
    char buf[40];
    for (int u = 0; u < kNumAttributes; ++u) {
        out << kAttributeLabels[static_cast<std::size_t>(u)];
        for (int v = 0; v < kNumAttributes; ++v) {
            std::snprintf(buf, sizeof buf, "%.17g", sigma(u, v));
            out << "," << buf;
        }
        out << "\n";
    }
}

}  // namespace copulasim::fixtures

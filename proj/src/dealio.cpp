#include "copulasim/dealio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "copulasim/errors.hpp"

namespace copulasim {

namespace {

const char* kHeader = "id,founder,geo,markets,p,outcome";

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == sep) {
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

void save_deals(const std::vector<Deal>& deals, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write deals file: " + path);
    out << kHeader << "\n";
    char pbuf[40];
    for (const Deal& d : deals) {
        out << d.id << ',' << founder_label(d.founder) << ',' << geography_label(d.geo) << ',';
        bool first = true;
        for (int k = 0; k < kNumMarkets; ++k) {
            Market m = static_cast<Market>(k);
            if (d.markets.contains(m)) {
                if (!first) out << ';';
                out << market_label(m);
                first = false;
            }
        }
        std::snprintf(pbuf, sizeof pbuf, "%.17g", d.p.value());
        out << ',' << pbuf << ',';
        if (d.outcome) out << *d.outcome;
        out << "\n";
    }
}

std::vector<Deal> load_deals(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open deals file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw parse_error("missing header in " + path, 1);
    if (split(line, ',') != split(kHeader, ','))
        throw parse_error("deal file header must be '" + std::string(kHeader) + "'", 1);

    std::vector<Deal> deals;
    std::unordered_set<std::string> ids;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto cells = split(line, ',');
        if (cells.size() != 6) throw parse_error("expected 6 columns", lineno);
        Deal d;
        d.id = cells[0];
        if (d.id.empty()) throw parse_error("empty deal id", lineno);
        if (!ids.insert(d.id).second)
            throw parse_error("duplicate deal id '" + d.id + "'", lineno);
        try {
            d.founder = founder_from_label(cells[1]);
            d.geo = geography_from_label(cells[2]);
            if (!cells[3].empty())
                for (const std::string& m : split(cells[3], ';'))
                    d.markets.add(market_from_label(m));
            std::size_t used = 0;
            double p = std::stod(cells[4], &used);
            if (used != cells[4].size()) throw std::invalid_argument("trailing text after p");
            d.p = Probability(p);
            if (!cells[5].empty()) {
                if (cells[5] == "0")
                    d.outcome = 0;
                else if (cells[5] == "1")
                    d.outcome = 1;
                else
                    throw std::invalid_argument("outcome must be empty, 0 or 1");
            }
        } catch (const std::exception& e) {
            throw parse_error(std::string("bad deal row: ") + e.what(), lineno);
        }
        deals.push_back(std::move(d));
    }
    return deals;
}

}  // namespace copulasim

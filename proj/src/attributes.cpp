#include "copulasim/attributes.hpp"

#include <bit>
#include <stdexcept>

namespace copulasim {

const std::array<std::string, kNumAttributes> kAttributeLabels = {
    "F_first", "F_repeat", "G_CA",       "G_NY",       "G_OtherUS",  "G_Intl",
    "M_SaaS",  "M_AI",     "M_Fintech",  "M_Consumer", "M_DevTools", "M_Health"};

int MarketSet::size() const { return std::popcount(static_cast<unsigned>(bits_)); }

bool MarketSet::any_hot() const {
    for (Market m : kHotMarkets)
        if (contains(m)) return true;
    return false;
}

MarketSet MarketSet::from_bits(std::uint8_t bits) {
    if (bits >= (1u << kNumMarkets))
        throw std::invalid_argument("MarketSet: bits outside the 6 market flags");
    MarketSet s;
    s.bits_ = bits;
    return s;
}

std::vector<int> AttributeVector::active() const {
    std::vector<int> out;
    for (int i = 0; i < kNumAttributes; ++i)
        if (bit(i)) out.push_back(i);
    return out;
}

AttributeVector AttributeVector::from_bits(std::uint16_t bits) {
    if (bits >= (1u << kNumAttributes))
        throw std::invalid_argument("AttributeVector: bits outside 12 attributes");
    int founder = std::popcount(static_cast<unsigned>(bits & 0x3u));
    int geo = std::popcount(static_cast<unsigned>(bits & 0x3cu));
    if (founder != 1 || geo != 1)
        throw std::invalid_argument("AttributeVector: founder/geography must be one-hot");
    AttributeVector e;
    e.bits_ = bits;
    return e;
}

AttributeVector encode(const Deal& d) {
    std::uint16_t bits = 0;
    bits |= static_cast<std::uint16_t>(1u << static_cast<int>(d.founder));
    bits |= static_cast<std::uint16_t>(1u << (2 + static_cast<int>(d.geo)));
    bits |= static_cast<std::uint16_t>(d.markets.bits()) << 6;
    return AttributeVector(bits);
}

Deal decode(const AttributeVector& e) {
    std::uint16_t bits = e.bits();
    AttributeVector::from_bits(bits);  // re-validate one-hot structure
    Deal d;
    d.founder = (bits & 0x2u) ? FounderType::Repeat : FounderType::FirstTime;
    for (int g = 0; g < kNumGeographies; ++g)
        if (bits & (1u << (2 + g))) d.geo = static_cast<Geography>(g);
    d.markets = MarketSet::from_bits(static_cast<std::uint8_t>(bits >> 6));
    return d;
}

std::string founder_label(FounderType f) {
    return f == FounderType::FirstTime ? "FirstTime" : "Repeat";
}

std::string geography_label(Geography g) {
    switch (g) {
        case Geography::CA: return "CA";
        case Geography::NY: return "NY";
        case Geography::OtherUS: return "OtherUS";
        case Geography::Intl: return "Intl";
    }
    throw std::logic_error("bad geography");
}

std::string market_label(Market m) {
    switch (m) {
        case Market::SaaS: return "SaaS";
        case Market::AI: return "AI";
        case Market::Fintech: return "Fintech";
        case Market::Consumer: return "Consumer";
        case Market::DevTools: return "DevTools";
        case Market::Health: return "Health";
    }
    throw std::logic_error("bad market");
}

FounderType founder_from_label(const std::string& s) {
    if (s == "FirstTime") return FounderType::FirstTime;
    if (s == "Repeat") return FounderType::Repeat;
    throw std::invalid_argument("unknown founder type: " + s);
}

Geography geography_from_label(const std::string& s) {
    if (s == "CA") return Geography::CA;
    if (s == "NY") return Geography::NY;
    if (s == "OtherUS") return Geography::OtherUS;
    if (s == "Intl") return Geography::Intl;
    throw std::invalid_argument("unknown geography: " + s);
}

Market market_from_label(const std::string& s) {
    if (s == "SaaS") return Market::SaaS;
    if (s == "AI") return Market::AI;
    if (s == "Fintech") return Market::Fintech;
    if (s == "Consumer") return Market::Consumer;
    if (s == "DevTools") return Market::DevTools;
    if (s == "Health") return Market::Health;
    throw std::invalid_argument("unknown market: " + s);
}

}  // namespace copulasim

#ifndef COPULASIM_ATTRIBUTES_HPP
#define COPULASIM_ATTRIBUTES_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "copulasim/normal.hpp"

namespace copulasim {

enum class FounderType : std::uint8_t { FirstTime = 0, Repeat = 1 };

enum class Geography : std::uint8_t { CA = 0, NY = 1, OtherUS = 2, Intl = 3 };

enum class Market : std::uint8_t {
    SaaS = 0,
    AI = 1,
    Fintech = 2,
    Consumer = 3,
    DevTools = 4,
    Health = 5
};

inline constexpr int kNumGeographies = 4;
inline constexpr int kNumMarkets = 6;
inline constexpr int kNumAttributes = 12;  // 2 founder + 4 geography + 6 market

// Frozen attribute ordering used by every table, file format and matrix in
// the project: [F_first, F_repeat, G_CA, G_NY, G_OtherUS, G_Intl,
//               M_SaaS, M_AI, M_Fintech, M_Consumer, M_DevTools, M_Health].
extern const std::array<std::string, kNumAttributes> kAttributeLabels;

// The three hot sectors carrying the synthetic probability nudge.
inline constexpr std::array<Market, 3> kHotMarkets = {Market::SaaS, Market::AI,
                                                      Market::Fintech};

//! Set of market labels carried by a deal; may be empty, may hold several.
class MarketSet {
  public:
    MarketSet() : bits_(0) {}
    explicit MarketSet(std::initializer_list<Market> ms) : bits_(0) {
        for (Market m : ms) add(m);
    }

    void add(Market m) { bits_ |= mask(m); }
    void remove(Market m) { bits_ &= static_cast<std::uint8_t>(~mask(m)); }
    bool contains(Market m) const { return bits_ & mask(m); }
    bool empty() const { return bits_ == 0; }
    int size() const;
    bool any_hot() const;
    std::uint8_t bits() const { return bits_; }
    static MarketSet from_bits(std::uint8_t bits);

    bool operator==(const MarketSet&) const = default;

  private:
    static std::uint8_t mask(Market m) {
        return static_cast<std::uint8_t>(1u << static_cast<int>(m));
    }
    std::uint8_t bits_;
};

struct Deal {
    std::string id;
    FounderType founder = FounderType::FirstTime;
    Geography geo = Geography::CA;
    MarketSet markets;
    Probability p;
    std::optional<int> outcome;  // 0/1 when observed

    bool operator==(const Deal&) const = default;
};

//! 12-bit indicator encoding of a deal: founder one-hot, geography one-hot,
//! markets multi-hot, in the frozen attribute order.
class AttributeVector {
  public:
    AttributeVector() : bits_(0) {}

    bool bit(int i) const { return (bits_ >> i) & 1u; }
    std::uint16_t bits() const { return bits_; }

    //! Indices of the set bits, ascending.
    std::vector<int> active() const;

    static AttributeVector from_bits(std::uint16_t bits);

    bool operator==(const AttributeVector&) const = default;

  private:
    explicit AttributeVector(std::uint16_t bits) : bits_(bits) {}
    friend AttributeVector encode(const Deal& d);
    std::uint16_t bits_;
};

AttributeVector encode(const Deal& d);

//! Inverse of encode (ignores id/p/outcome). Throws std::invalid_argument if
//! the bit pattern violates the one-hot constraints.
Deal decode(const AttributeVector& e);

std::string founder_label(FounderType f);
std::string geography_label(Geography g);
std::string market_label(Market m);
FounderType founder_from_label(const std::string& s);
Geography geography_from_label(const std::string& s);
Market market_from_label(const std::string& s);

}  // namespace copulasim

#endif

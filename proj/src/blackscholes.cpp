#include "uvsb/blackscholes.hpp"

#include <cmath>
#include <numbers>

namespace uvsb {

namespace {

void check(const BsQuote& q)
{
    if (!(q.spot > 0.0 && q.strike > 0.0 && q.vol > 0.0 && q.maturity > 0.0) || !std::isfinite(q.rate)) {
        throw ConfigError("Black-Scholes quote requires positive spot, strike, vol and maturity");
    }
}

struct D12 {
    double d1;
    double d2;
};

D12 d12(const BsQuote& q)
{
    const double sd = q.vol * std::sqrt(q.maturity);
    const double d1 = (std::log(q.spot / q.strike) + (q.rate + 0.5 * q.vol * q.vol) * q.maturity) / sd;
    return {d1, d1 - sd};
}

}  // namespace

// erfc keeps full relative accuracy in the lower tail, where 1 + erf loses it.
double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double bs_call(const BsQuote& q)
{
    check(q);
    const auto [d1, d2] = d12(q);
    return q.spot * norm_cdf(d1) - q.strike * std::exp(-q.rate * q.maturity) * norm_cdf(d2);
}

double bs_put(const BsQuote& q)
{
    check(q);
    const auto [d1, d2] = d12(q);
    return q.strike * std::exp(-q.rate * q.maturity) * norm_cdf(-d2) - q.spot * norm_cdf(-d1);
}

double bs_butterfly(double spot, const Butterfly& b, double vol, double maturity, double rate)
{
    validate(PayoffSpec{b});
    const auto w = butterfly_weights(b);
    auto call = [&](double k) { return bs_call({spot, k, vol, maturity, rate}); };
    return w[0] * call(b.k1) - w[1] * call(b.k2) + w[2] * call(b.k3);
}

double bs_price(const PayoffSpec& payoff, double spot, double vol, double maturity, double rate)
{
    validate(payoff);
    if (spot <= 0.0) return evaluate(payoff, 0.0);
    if (const auto* b = std::get_if<Butterfly>(&payoff)) return bs_butterfly(spot, *b, vol, maturity, rate);
    if (const auto* c = std::get_if<Call>(&payoff)) return bs_call({spot, c->strike, vol, maturity, rate});
    if (const auto* c = std::get_if<Put>(&payoff)) return bs_put({spot, c->strike, vol, maturity, rate});
    if (const auto* c = std::get_if<CappedLinear>(&payoff)) {
        return spot - bs_call({spot, c->strike, vol, maturity, rate});
    }
    throw ConfigError("payoff '" + payoff_name(payoff) + "' has no closed-form Black-Scholes price");
}

}  // namespace uvsb

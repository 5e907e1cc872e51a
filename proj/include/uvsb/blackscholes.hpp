#pragma once

#include "uvsb/payoff.hpp"

namespace uvsb {

struct BsQuote {
    double spot = 100.0;
    double strike = 100.0;
    double vol = 0.2;       // per sqrt(year)
    double maturity = 1.0;  // years
    double rate = 0.0;
};

/// Standard normal CDF.
double norm_cdf(double x);

/// Throws ConfigError unless spot, strike, vol and maturity are positive.
double bs_call(const BsQuote& q);
double bs_put(const BsQuote& q);

/// Linear combination of calls matching the butterfly payoff.
double bs_butterfly(double spot, const Butterfly& strikes, double vol, double maturity, double rate);

/// Constant-volatility price of a payoff that decomposes into calls, puts
/// and the underlying (butterfly, call, put, capped linear).  A zero spot
/// returns the payoff at zero.  Throws ConfigError for tabulated payoffs.
double bs_price(const PayoffSpec& payoff, double spot, double vol, double maturity, double rate);

}  // namespace uvsb

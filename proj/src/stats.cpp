#include "dgik/stats.hpp"

#include <boost/math/distributions/beta.hpp>

#include "dgik/types.hpp"

namespace dgik {

BinomialInterval jeffreys_interval(int successes, int trials, double level) {
  if (trials < 1 || successes < 0 || successes > trials)
    throw InvalidCounts("jeffreys_interval: need 0 <= successes <= trials, trials >= 1");
  if (!(level > 0.0 && level < 1.0)) throw InvalidCounts("jeffreys_interval: level in (0,1)");

  const boost::math::beta_distribution<double> posterior(successes + 0.5,
                                                         trials - successes + 0.5);
  const double tail = 0.5 * (1.0 - level);
  BinomialInterval out;
  out.low = successes == 0 ? 0.0 : boost::math::quantile(posterior, tail);
  out.high = successes == trials ? 1.0 : boost::math::quantile(posterior, 1.0 - tail);
  return out;
}

}  // namespace dgik

#pragma once

namespace dgik {

struct BinomialInterval {
  double low = 0.0;
  double high = 1.0;
};

// Equal-tailed Jeffreys interval: Beta(x + 1/2, n - x + 1/2) quantiles, with
// low pinned to 0 when x = 0 and high pinned to 1 when x = n. Throws
// InvalidCounts on malformed inputs.
BinomialInterval jeffreys_interval(int successes, int trials, double level = 0.95);

}  // namespace dgik

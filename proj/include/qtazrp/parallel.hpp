#ifndef QTAZRP_PARALLEL_HPP
#define QTAZRP_PARALLEL_HPP

#include <functional>

namespace qtazrp {

/// Global cap on worker threads (0 = hardware concurrency, 1 = serial).
void set_max_threads(int n);
int max_threads();

/// Runs fn(i) for i in [0, count).  Work is split into contiguous blocks; the
/// caller must make fn(i) write only to slot i of its own output so results
/// do not depend on scheduling.
void parallel_for(long count, const std::function<void(long)>& fn);

}  // namespace qtazrp

#endif

#pragma once

namespace localis {

/// Number of worker threads to use for `task_count` independent tasks:
/// hardware concurrency, capped by the LOCALIS_THREADS environment variable
/// (when set to a positive integer) and by the task count itself; at least 1.
int thread_budget(long task_count);

}  // namespace localis

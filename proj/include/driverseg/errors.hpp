#pragma once

#include <stdexcept>
#include <string>

namespace driverseg {

// Base class for every error raised by the toolkit.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid run configuration or fleet spec. CLI exit code 2.
struct config_error : error {
  using error::error;
};

// Missing or empty input data. CLI exit code 3.
struct data_error : error {
  using error::error;
};

// Missing intermediate results for the report stage. CLI exit code 4.
struct missing_results_error : error {
  using error::error;
};

// Malformed content in a session log (bad field, bad float).
struct parse_error : error {
  using error::error;
};

// Wrong column set in a session log or bad file naming.
struct schema_error : error {
  using error::error;
};

// Non-monotone timestamps in a session log.
struct ordering_error : error {
  using error::error;
};

// Too few samples for an operation (resampling, splitting).
struct insufficient_data_error : error {
  using error::error;
};

// Operation requires a non-empty input sequence.
struct empty_input_error : error {
  using error::error;
};

// No usable data left after filtering/trimming.
struct no_data_error : error {
  using error::error;
};

// Bin range would collapse to a single point.
struct degenerate_range_error : error {
  using error::error;
};

// Value falls outside the histogram bin range.
struct value_range_error : error {
  using error::error;
};

// Requested cluster count exceeds the number of points.
struct infeasible_error : error {
  using error::error;
};

// Cluster count or another argument outside its domain.
struct domain_error : error {
  using error::error;
};

// Two clusterings do not label the same user sequence.
struct alignment_error : error {
  using error::error;
};

// Subsampling fraction yields zero elements.
struct empty_sample_error : error {
  using error::error;
};

}  // namespace driverseg

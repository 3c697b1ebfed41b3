#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace meshband {

// Row-major so that row-major flattening and binary IO are contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// One task experiment session within a subject's concatenated timeline.
struct SessionSpec {
    int task_label = 0;            // class index in [1, C]
    std::int64_t n_scans = 0;      // D_q
    std::int64_t offset = 0;       // start index within the subject timeline
};

struct SubjectRecord {
    std::string subject_id;
    Matrix series;                 // R x T region-averaged signals
    std::vector<SessionSpec> sessions;

    std::int64_t timeline_length() const { return series.cols(); }
};

struct Dataset {
    std::vector<SubjectRecord> subjects;
    int n_classes = 0;
    std::vector<std::string> region_names;  // optional; empty or size R

    Index n_regions() const { return subjects.empty() ? 0 : subjects.front().series.rows(); }
    std::int64_t n_sessions() const;

    /// Throws std::runtime_error on any structural violation.
    void validate() const;
};

}  // namespace meshband

#include "meshband/dataset.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace meshband {

std::int64_t Dataset::n_sessions() const {
    std::int64_t n = 0;
    for (const auto& s : subjects) n += static_cast<std::int64_t>(s.sessions.size());
    return n;
}

void Dataset::validate() const {
    if (subjects.empty()) throw std::runtime_error("dataset: no subjects");
    if (n_classes < 1) throw std::runtime_error("dataset: n_classes must be >= 1");

    const Index r_count = subjects.front().series.rows();
    if (!region_names.empty() && static_cast<Index>(region_names.size()) != r_count) {
        throw std::runtime_error("dataset: region_names size does not match region count");
    }

    std::set<int> seen_labels;
    for (const auto& subject : subjects) {
        if (subject.series.rows() != r_count) {
            throw std::runtime_error("dataset: subject " + subject.subject_id + " has " +
                                     std::to_string(subject.series.rows()) + " regions, expected " +
                                     std::to_string(r_count));
        }
        if (!subject.series.allFinite()) {
            throw std::runtime_error("dataset: subject " + subject.subject_id +
                                     " contains non-finite values");
        }
        if (subject.sessions.empty()) {
            throw std::runtime_error("dataset: subject " + subject.subject_id + " has no sessions");
        }
        std::int64_t expected_offset = 0;
        for (const auto& session : subject.sessions) {
            if (session.task_label < 1 || session.task_label > n_classes) {
                throw std::runtime_error("dataset: subject " + subject.subject_id +
                                         " session label " + std::to_string(session.task_label) +
                                         " outside [1, " + std::to_string(n_classes) + "]");
            }
            if (session.n_scans < 1) {
                throw std::runtime_error("dataset: subject " + subject.subject_id +
                                         " has a session with n_scans < 1");
            }
            if (session.offset != expected_offset) {
                throw std::runtime_error("dataset: subject " + subject.subject_id +
                                         " sessions do not tile the timeline (offset " +
                                         std::to_string(session.offset) + ", expected " +
                                         std::to_string(expected_offset) + ")");
            }
            expected_offset += session.n_scans;
            seen_labels.insert(session.task_label);
        }
        if (expected_offset != subject.timeline_length()) {
            throw std::runtime_error("dataset: subject " + subject.subject_id + " sessions cover " +
                                     std::to_string(expected_offset) + " scans but timeline has " +
                                     std::to_string(subject.timeline_length()));
        }
    }
    for (int c = 1; c <= n_classes; ++c) {
        if (!seen_labels.count(c)) {
            throw std::runtime_error("dataset: class " + std::to_string(c) + " has no sessions");
        }
    }
}

Vector region_average(const Matrix& voxel_matrix) {
    if (voxel_matrix.rows() == 0) throw std::invalid_argument("region_average: no voxels in region");
    if (!voxel_matrix.allFinite()) {
        throw std::invalid_argument("region_average: non-finite voxel value");
    }
    return voxel_matrix.colwise().mean().transpose();
}

Vector slice_session(const Vector& signal, const SessionSpec& spec) {
    if (spec.offset < 0 || spec.n_scans < 0 || spec.offset + spec.n_scans > signal.size()) {
        throw std::out_of_range("slice_session: window [" + std::to_string(spec.offset) + ", " +
                                std::to_string(spec.offset + spec.n_scans) +
                                ") outside timeline of length " + std::to_string(signal.size()));
    }
    return signal.segment(spec.offset, spec.n_scans);
}

Matrix slice_session(const Matrix& series, const SessionSpec& spec) {
    if (spec.offset < 0 || spec.n_scans < 0 || spec.offset + spec.n_scans > series.cols()) {
        throw std::out_of_range("slice_session: window [" + std::to_string(spec.offset) + ", " +
                                std::to_string(spec.offset + spec.n_scans) +
                                ") outside timeline of length " + std::to_string(series.cols()));
    }
    return series.middleCols(spec.offset, spec.n_scans);
}

}  // namespace meshband

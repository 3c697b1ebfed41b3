#pragma once

#include "meshband/types.hpp"

namespace meshband {

/// Representative series of a region: per-scan mean over the voxel rows.
/// Throws if the matrix has no rows or contains non-finite values.
Vector region_average(const Matrix& voxel_matrix);

/// Contiguous window [offset, offset + n_scans) of a subject timeline.
Vector slice_session(const Vector& signal, const SessionSpec& spec);

/// Same window applied to every region row of an R x T matrix.
Matrix slice_session(const Matrix& series, const SessionSpec& spec);

}  // namespace meshband

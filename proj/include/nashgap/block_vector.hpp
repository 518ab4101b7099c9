#pragma once

#include <Eigen/Dense>

#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "nashgap/errors.hpp"

namespace nashgap {

/// Joint strategy partitioned into per-player blocks.
///
/// Storage is one contiguous vector; block(nu) returns a segment view into it,
/// so block arithmetic composes with ordinary Eigen expressions.
template <typename Scalar>
class BlockVectorT {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Index = Eigen::Index;

  BlockVectorT() = default;

  /// Zero vector with the given block sizes.
  explicit BlockVectorT(std::vector<Index> dims) : dims_(std::move(dims)) {
    build_offsets();
    data_ = Vector::Zero(total_);
  }

  template <typename Derived>
  static BlockVectorT split(const Eigen::MatrixBase<Derived>& flat,
                            std::vector<Index> dims) {
    BlockVectorT out(std::move(dims));
    if (flat.size() != out.size()) {
      throw ConformanceError("flat vector of length " + std::to_string(flat.size()) +
                             " does not match block dims totalling " +
                             std::to_string(out.size()));
    }
    out.data_ = flat;
    return out;
  }

  static BlockVectorT from_blocks(const std::vector<Vector>& blocks) {
    std::vector<Index> dims;
    dims.reserve(blocks.size());
    for (const auto& b : blocks) dims.push_back(b.size());
    BlockVectorT out(std::move(dims));
    for (Index nu = 0; nu < out.num_blocks(); ++nu) out.block(nu) = blocks[nu];
    return out;
  }

  Index num_blocks() const { return static_cast<Index>(dims_.size()); }
  Index size() const { return total_; }
  Index block_dim(Index nu) const { return dims_[checked(nu)]; }
  Index offset(Index nu) const { return offsets_[checked(nu)]; }
  const std::vector<Index>& dims() const { return dims_; }

  auto block(Index nu) { return data_.segment(offsets_[checked(nu)], dims_[nu]); }
  auto block(Index nu) const { return data_.segment(offsets_[checked(nu)], dims_[nu]); }

  const Vector& flat() const { return data_; }
  Vector flatten() const { return data_; }

  /// Overwrite all entries; the block structure is kept.
  template <typename Derived>
  void assign(const Eigen::MatrixBase<Derived>& flat) {
    if (flat.size() != total_) {
      throw ConformanceError("assign: length " + std::to_string(flat.size()) +
                             " != " + std::to_string(total_));
    }
    data_ = flat;
  }

  bool conforms(const std::vector<Index>& dims) const { return dims_ == dims; }

  bool operator==(const BlockVectorT& other) const {
    return dims_ == other.dims_ && data_ == other.data_;
  }

 private:
  Index checked(Index nu) const {
    if (nu < 0 || nu >= num_blocks()) {
      throw ConformanceError("block index " + std::to_string(nu) + " out of range [0, " +
                             std::to_string(num_blocks()) + ")");
    }
    return nu;
  }

  void build_offsets() {
    offsets_.resize(dims_.size());
    total_ = 0;
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      if (dims_[i] < 1) throw ConformanceError("block sizes must be positive");
      offsets_[i] = total_;
      total_ += dims_[i];
    }
  }

  std::vector<Index> dims_;
  std::vector<Index> offsets_;
  Index total_ = 0;
  Vector data_;
};

using BlockVector = BlockVectorT<double>;

/// The mixed point (y^nu, x^{-nu}); x is left untouched.
template <typename Scalar, typename Derived>
BlockVectorT<Scalar> swap_block(const BlockVectorT<Scalar>& x, Eigen::Index nu,
                                const Eigen::MatrixBase<Derived>& y) {
  if (y.size() != x.block_dim(nu)) {
    throw ConformanceError("swap_block: block " + std::to_string(nu) + " has length " +
                           std::to_string(x.block_dim(nu)) + ", replacement has " +
                           std::to_string(y.size()));
  }
  BlockVectorT<Scalar> out = x;
  out.block(nu) = y;
  return out;
}

}  // namespace nashgap

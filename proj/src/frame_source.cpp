#include "svo/frame_source.hpp"

#include "svo/error.hpp"

namespace svo {

SliceSource::SliceSource(const FrameSource& base, std::size_t begin, std::size_t end)
    : base_(base), begin_(begin), end_(end) {
  if (begin > end || end > base.size()) {
    throw Error(ErrorCode::IndexOutOfRange,
                "frame slice " + std::to_string(begin) + ".." + std::to_string(end) +
                    " exceeds sequence of " + std::to_string(base.size()) + " frames");
  }
}

StereoFrame SliceSource::frame(std::size_t index) const {
  if (index >= size()) throw Error(ErrorCode::IndexOutOfRange, "frame index out of range");
  return base_.frame(begin_ + index);
}

std::optional<Trajectory> SliceSource::ground_truth() const {
  auto gt = base_.ground_truth();
  if (!gt) return std::nullopt;
  return Trajectory(gt->begin() + static_cast<std::ptrdiff_t>(begin_),
                    gt->begin() + static_cast<std::ptrdiff_t>(end_));
}

std::string SliceSource::name() const {
  return base_.name() + "[" + std::to_string(begin_) + ".." + std::to_string(end_) + "]";
}

}  // namespace svo

#pragma once

#include "svo/geometry.hpp"
#include "svo/image.hpp"

#include <cstddef>
#include <optional>
#include <string>

namespace svo {

struct StereoFrame {
  GrayImage left;
  GrayImage right;
};

// Random-access stream of rectified stereo pairs with calibration and
// optional ground truth (camera-to-world poses, one per frame).
class FrameSource {
 public:
  virtual ~FrameSource() = default;

  virtual std::size_t size() const = 0;
  virtual StereoFrame frame(std::size_t index) const = 0;
  virtual const StereoRig& rig() const = 0;
  virtual std::optional<Trajectory> ground_truth() const = 0;
  virtual std::string name() const = 0;
};

// Frames [begin, end) of another source, re-indexed from zero.
class SliceSource : public FrameSource {
 public:
  SliceSource(const FrameSource& base, std::size_t begin, std::size_t end);

  std::size_t size() const override { return end_ - begin_; }
  StereoFrame frame(std::size_t index) const override;
  const StereoRig& rig() const override { return base_.rig(); }
  std::optional<Trajectory> ground_truth() const override;
  std::string name() const override;

 private:
  const FrameSource& base_;
  std::size_t begin_;
  std::size_t end_;
};

}  // namespace svo

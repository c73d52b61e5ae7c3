#pragma once

#include "svo/frame_source.hpp"
#include "svo/geometry.hpp"

#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace svo {

// KITTI odometry layout:
//   <root>/sequences/<id>/{image_0,image_1}/*.png, calib.txt, times.txt
//   <root>/poses/<id>.txt (optional, 12 values per line)
class KittiSequence : public FrameSource {
 public:
  KittiSequence(std::filesystem::path sequence_dir, std::vector<std::filesystem::path> left,
                std::vector<std::filesystem::path> right, StereoRig rig,
                std::optional<Trajectory> gt_poses, std::optional<std::vector<double>> timestamps);

  std::size_t size() const override { return left_.size(); }
  // Images are decoded on demand; colour files are converted to luma.
  StereoFrame frame(std::size_t index) const override;
  const StereoRig& rig() const override { return rig_; }
  std::optional<Trajectory> ground_truth() const override { return gt_poses_; }
  std::string name() const override { return dir_.string(); }

  const std::optional<std::vector<double>>& timestamps() const { return timestamps_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> left_;
  std::vector<std::filesystem::path> right_;
  StereoRig rig_;
  std::optional<Trajectory> gt_poses_;
  std::optional<std::vector<double>> timestamps_;
};

KittiSequence open_sequence(const std::filesystem::path& root, const std::string& sequence_id);

// fx, fy, cx, cy from P0; baseline = -P1[0,3] / P1[0,0].
StereoRig parse_calibration(std::istream& in);

Trajectory parse_poses(std::istream& in);
Trajectory read_poses(const std::filesystem::path& path);
void write_poses(std::ostream& out, const Trajectory& poses);

GrayImage load_gray_image(const std::filesystem::path& path);
void save_gray_image(const std::filesystem::path& path, const GrayImage& img);

// Writes any frame source in the layout above (used for synthetic fixtures).
void write_kitti_sequence(const std::filesystem::path& root, const std::string& sequence_id,
                          const FrameSource& source);

}  // namespace svo

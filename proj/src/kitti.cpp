#include "svo/kitti.hpp"

#include "svo/error.hpp"

#include <opencv2/imgcodecs.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace svo {

namespace fs = std::filesystem;

KittiSequence::KittiSequence(fs::path sequence_dir, std::vector<fs::path> left,
                             std::vector<fs::path> right, StereoRig rig,
                             std::optional<Trajectory> gt_poses,
                             std::optional<std::vector<double>> timestamps)
    : dir_(std::move(sequence_dir)), left_(std::move(left)), right_(std::move(right)), rig_(rig),
      gt_poses_(std::move(gt_poses)), timestamps_(std::move(timestamps)) {}

StereoFrame KittiSequence::frame(std::size_t index) const {
  if (index >= left_.size()) throw Error(ErrorCode::IndexOutOfRange, "frame index out of range");
  return {load_gray_image(left_[index]), load_gray_image(right_[index])};
}

namespace {

std::vector<fs::path> list_images(const fs::path& dir) {
  std::vector<fs::path> files;
  if (!fs::is_directory(dir)) throw Error(ErrorCode::ImageDecodeError, "missing image directory " + dir.string());
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto ext = entry.path().extension().string();
    if (entry.is_regular_file() && (ext == ".png" || ext == ".jpg" || ext == ".pgm")) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

StereoRig parse_calibration(std::istream& in) {
  std::optional<std::array<double, 12>> p0;
  std::optional<std::array<double, 12>> p1;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    std::array<double, 12> m{};
    bool ok = true;
    for (double& v : m) ok = ok && static_cast<bool>(ls >> v);
    if (key == "P0:" && ok) p0 = m;
    if (key == "P1:" && ok) p1 = m;
  }
  if (!p0 || !p1) throw Error(ErrorCode::MissingCalibration, "calib.txt lacks P0/P1 projection matrices");
  StereoRig rig;
  rig.intrinsics = {(*p0)[0], (*p0)[5], (*p0)[2], (*p0)[6]};
  rig.baseline = -(*p1)[3] / (*p1)[0];
  if (!rig.valid()) throw Error(ErrorCode::MissingCalibration, "calibration yields an invalid rig");
  return rig;
}

Trajectory parse_poses(std::istream& in) {
  Trajectory poses;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    Eigen::Matrix<double, 3, 4> m;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 4; ++c) {
        if (!(ls >> m(r, c))) {
          throw Error(ErrorCode::MalformedPoseFile, "line " + std::to_string(line_no) + " has fewer than 12 values");
        }
      }
    }
    double extra = 0.0;
    if (ls >> extra) {
      throw Error(ErrorCode::MalformedPoseFile, "line " + std::to_string(line_no) + " has more than 12 values");
    }
    poses.push_back(Pose::from_matrix34(m));
  }
  return poses;
}

Trajectory read_poses(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MalformedPoseFile, "cannot open " + path.string());
  return parse_poses(in);
}

void write_poses(std::ostream& out, const Trajectory& poses) {
  char buf[40];
  for (const auto& pose : poses) {
    const auto m = pose.matrix34();
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 4; ++c) {
        std::snprintf(buf, sizeof(buf), "%.12e", m(r, c));
        out << buf << ((r == 2 && c == 3) ? '\n' : ' ');
      }
    }
  }
}

GrayImage load_gray_image(const fs::path& path) {
  // IMREAD_GRAYSCALE applies the BT.601 luma weights to colour input.
  cv::Mat mat = cv::imread(path.string(), cv::IMREAD_GRAYSCALE);
  if (mat.empty() || mat.type() != CV_8UC1) {
    throw Error(ErrorCode::ImageDecodeError, "cannot decode " + path.string());
  }
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(mat.cols) * mat.rows);
  for (int y = 0; y < mat.rows; ++y) {
    std::copy_n(mat.ptr<std::uint8_t>(y), mat.cols, pixels.begin() + static_cast<std::ptrdiff_t>(y) * mat.cols);
  }
  return GrayImage(mat.cols, mat.rows, std::move(pixels));
}

void save_gray_image(const fs::path& path, const GrayImage& img) {
  cv::Mat mat(img.height(), img.width(), CV_8UC1, const_cast<std::uint8_t*>(img.pixels().data()));
  if (!cv::imwrite(path.string(), mat)) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

KittiSequence open_sequence(const fs::path& root, const std::string& sequence_id) {
  const fs::path dir = root / "sequences" / sequence_id;
  const fs::path calib = dir / "calib.txt";
  std::ifstream calib_in(calib);
  if (!calib_in) throw Error(ErrorCode::MissingCalibration, "missing calibration file " + calib.string());
  const StereoRig rig = parse_calibration(calib_in);

  auto left = list_images(dir / "image_0");
  auto right = list_images(dir / "image_1");
  if (left.size() != right.size()) {
    throw Error(ErrorCode::ImageDecodeError, "image_0 has " + std::to_string(left.size()) +
                                                 " frames but image_1 has " + std::to_string(right.size()));
  }
  for (std::size_t i = 0; i < left.size(); ++i) {
    if (left[i].filename() != right[i].filename()) {
      throw Error(ErrorCode::ImageDecodeError, "left/right frame names differ at index " + std::to_string(i));
    }
  }

  std::optional<Trajectory> gt;
  const fs::path pose_file = root / "poses" / (sequence_id + ".txt");
  if (fs::exists(pose_file)) {
    gt = read_poses(pose_file);
    if (gt->size() != left.size()) {
      throw Error(ErrorCode::MalformedPoseFile, "pose count " + std::to_string(gt->size()) +
                                                    " differs from frame count " + std::to_string(left.size()));
    }
  }
  std::optional<std::vector<double>> times;
  if (std::ifstream tin(dir / "times.txt"); tin) {
    std::vector<double> t;
    double v = 0.0;
    while (tin >> v) t.push_back(v);
    times = std::move(t);
  }
  return KittiSequence(dir, std::move(left), std::move(right), rig, std::move(gt), std::move(times));
}

void write_kitti_sequence(const fs::path& root, const std::string& sequence_id, const FrameSource& source) {
  const fs::path dir = root / "sequences" / sequence_id;
  fs::create_directories(dir / "image_0");
  fs::create_directories(dir / "image_1");
  fs::create_directories(root / "poses");
  const auto& rig = source.rig();
  const auto& k = rig.intrinsics;
  {
    std::ofstream calib(dir / "calib.txt");
    char buf[512];
    for (int cam = 0; cam < 2; ++cam) {
      const double tx = cam == 0 ? 0.0 : -k.fx * rig.baseline;
      std::snprintf(buf, sizeof(buf), "P%d: %.12e 0 %.12e %.12e 0 %.12e %.12e 0 0 0 1 0\n", cam, k.fx, k.cx,
                    tx, k.fy, k.cy);
      calib << buf;
    }
  }
  std::ofstream times(dir / "times.txt");
  for (std::size_t i = 0; i < source.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "%06zu.png", i);
    const auto frame = source.frame(i);
    save_gray_image(dir / "image_0" / name, frame.left);
    save_gray_image(dir / "image_1" / name, frame.right);
    times << static_cast<double>(i) * 0.1 << "\n";
  }
  if (auto gt = source.ground_truth()) {
    std::ofstream poses(root / "poses" / (sequence_id + ".txt"));
    write_poses(poses, *gt);
  }
}

}  // namespace svo

#pragma once

#include "antnav/geometry.hpp"
#include "antnav/scene.hpp"

#include <filesystem>
#include <span>
#include <vector>

namespace antnav {

// Equiangular pinhole-free camera: every column and every row subtends the
// same angle, like an ommatidial lattice. Walls are extruded to wall_height
// and seen from eye_height.
struct CameraConfig {
    double fov = kPi / 2.0;      // horizontal and vertical
    int columns = 33;
    int rows = 33;
    double max_range = 64.0;     // metres
    double wall_height = 0.5;
    double eye_height = 0.25;
    bool textures = true;
    // Sub-rays per column; rows always integrate band coverage exactly.
    int supersample = 4;

    int pixel_count() const { return columns * rows; }
    // World-frame bearing offset (left positive) of the centre of a column.
    double column_offset(int column) const { return fov * (0.5 - (column + 0.5) / columns); }
    // Elevation of the centre of a row (row 0 at the top).
    double row_elevation(int row) const { return fov * (0.5 - (row + 0.5) / rows); }
    double column_width() const { return fov / columns; }
    double row_height() const { return fov / rows; }
};

// Row-major grayscale image with values in [0, 1].
class Image {
public:
    Image() = default;
    Image(int rows, int columns, double fill = 0.0)
        : rows_(rows), columns_(columns), pixels_(static_cast<std::size_t>(rows) * columns, fill) {}

    int rows() const { return rows_; }
    int columns() const { return columns_; }
    double &at(int r, int c) { return pixels_[static_cast<std::size_t>(r) * columns_ + c]; }
    double at(int r, int c) const { return pixels_[static_cast<std::size_t>(r) * columns_ + c]; }
    std::span<const double> pixels() const { return pixels_; }
    std::span<double> pixels() { return pixels_; }

    bool operator==(const Image &) const = default;

private:
    int rows_ = 0;
    int columns_ = 0;
    std::vector<double> pixels_;
};

struct RayHit {
    bool hit = false;
    double distance = 0.0;   // euclidean, metres
    int cell_x = -1;
    int cell_y = -1;
    double face_u = 0.0;     // position along the struck face, [0, 1)
    bool vertical_face = false;
};

inline constexpr double kSkyShade = 0.8;
inline constexpr double kFloorShade = 0.5;

RayHit cast_ray(const Scene &scene, Vec2 origin, double angle, double max_range);
std::vector<RayHit> cast_rays(const Scene &scene, const Pose &pose, const CameraConfig &camera);

// Shade of the wall cell face before distance attenuation, in [0.15, 0.85].
double wall_texture(const Scene &scene, const RayHit &hit, bool textures);

Image render_view(const Scene &scene, const Pose &pose, const CameraConfig &camera = {});

// Centre-on difference of Gaussians with reflective borders (edge sample repeated).
Image dog_filter(const Image &image, double sigma_center = 1.0, double sigma_surround = 2.0);

// Projection-neuron activations: DoG response min-max rescaled to [0, 1] per
// frame (all 0.5 for a flat response), flattened row-major.
struct PnVector {
    std::vector<float> values;
    std::size_t size() const { return values.size(); }
};

// Throws std::invalid_argument on non-finite pixels.
PnVector preprocess(const Image &raw);

// ASCII P2 dump, 255 levels.
void write_pgm(const Image &image, const std::filesystem::path &path);

}  // namespace antnav

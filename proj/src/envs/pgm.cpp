#include "daqn/envs/pgm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <vector>

namespace daqn {

void write_pgm(const std::filesystem::path& path, const Tensor& image) {
  const Shape& s = image.shape();
  const bool chw = s.size() == 3 && s[0] == 1;
  if (!chw && s.size() != 2) throw ShapeError("write_pgm expects [1, H, W] or [H, W], got " + to_string(s));
  const int h = s[s.size() - 2], w = s[s.size() - 1];
  std::vector<unsigned char> px(static_cast<std::size_t>(h) * w);
  for (std::size_t i = 0; i < px.size(); ++i)
    px[i] = static_cast<unsigned char>(std::lround(std::clamp(image[static_cast<Index>(i)], 0.0, 1.0) * 255.0));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "P5\n" << w << ' ' << h << "\n255\n";
  out.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace daqn

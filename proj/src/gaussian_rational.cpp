#include "qst/gaussian_rational.hpp"

#include <ostream>
#include <stdexcept>

namespace qst {

GaussianRational& GaussianRational::operator*=(const GaussianRational& o) {
  mpq_class re = re_ * o.re_ - im_ * o.im_;
  mpq_class im = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

GaussianRational& GaussianRational::operator/=(const GaussianRational& o) {
  const mpq_class n = o.norm();
  if (sgn(n) == 0) throw std::domain_error("division by zero Gaussian rational");
  mpq_class re = (re_ * o.re_ + im_ * o.im_) / n;
  mpq_class im = (im_ * o.re_ - re_ * o.im_) / n;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

GaussianRational GaussianRational::from_string(std::string_view re, std::string_view im) {
  return {parse_rational(re), parse_rational(im)};
}

std::string GaussianRational::to_string() const {
  if (is_real()) return rational_to_string(re_);
  std::string out;
  if (sgn(re_) != 0) out = rational_to_string(re_);
  if (sgn(im_) > 0 && !out.empty()) out += '+';
  out += rational_to_string(im_);
  out += 'i';
  return out;
}

std::size_t GaussianRational::hash() const {
  std::hash<std::string> h;
  return h(re_.get_str()) * 31u ^ h(im_.get_str());
}

std::ostream& operator<<(std::ostream& os, const GaussianRational& z) { return os << z.to_string(); }

mpq_class parse_rational(std::string_view text) {
  std::string s(text);
  while (!s.empty() && s.front() == ' ') s.erase(s.begin());
  while (!s.empty() && s.back() == ' ') s.pop_back();
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  bool seen_slash = false;
  bool digit_before = false;
  bool digit_after = false;
  for (; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '/') {
      if (seen_slash) throw std::invalid_argument("bad rational literal: " + s);
      seen_slash = true;
    } else if (c >= '0' && c <= '9') {
      (seen_slash ? digit_after : digit_before) = true;
    } else {
      throw std::invalid_argument("bad rational literal: " + s);
    }
  }
  if (!digit_before || (seen_slash && !digit_after)) throw std::invalid_argument("bad rational literal: " + s);
  if (s[0] == '+') s.erase(s.begin());
  mpq_class q;
  if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad rational literal: " + s);
  if (sgn(q.get_den()) == 0) throw std::invalid_argument("zero denominator: " + s);
  q.canonicalize();
  return q;
}

std::string rational_to_string(const mpq_class& q) { return q.get_str(); }

}  // namespace qst

#include "nelder_mead.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <cmath>
#include <memory>

#include "tailmax/errors.hpp"

namespace tailmax::detail {

namespace {

struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};
struct MinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};
using VectorPtr = std::unique_ptr<gsl_vector, VectorDeleter>;
using MinimizerPtr = std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter>;

double trampoline(const gsl_vector* v, void* params) {
  const auto& f = *static_cast<const Objective*>(params);
  const double value = f(std::span<const double>(v->data, v->size));
  return std::isfinite(value) ? value : GSL_POSINF;
}

VectorPtr make_vector(std::span<const double> values) {
  VectorPtr v(gsl_vector_alloc(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) gsl_vector_set(v.get(), i, values[i]);
  return v;
}

}  // namespace

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> start,
                             const NelderMeadOptions& options) {
  const std::size_t dim = start.size();
  if (dim == 0 || options.step.size() != dim) {
    fail(ErrorCode::InvalidArgument, "nelder_mead: start/step dimension mismatch");
  }
  // GSL's default handler aborts; errors are reported through status codes.
  static const auto previous = gsl_set_error_handler_off();
  (void)previous;

  NelderMeadResult best{start, f(start), 0};
  if (!std::isfinite(best.value)) best.value = GSL_POSINF;

  gsl_multimin_function fn{&trampoline, dim, const_cast<Objective*>(&f)};
  const VectorPtr step = make_vector(options.step);

  for (std::size_t round = 0; round <= options.restarts; ++round) {
    MinimizerPtr m(gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dim));
    const VectorPtr x0 = make_vector(best.x);
    if (gsl_multimin_fminimizer_set(m.get(), &fn, x0.get(), step.get()) != GSL_SUCCESS) break;

    for (std::size_t it = 0; it < options.max_iterations; ++it) {
      ++best.iterations;
      if (gsl_multimin_fminimizer_iterate(m.get()) != GSL_SUCCESS) break;
      const double size = gsl_multimin_fminimizer_size(m.get());
      if (gsl_multimin_test_size(size, options.size_tolerance) == GSL_SUCCESS) break;
    }
    const double value = gsl_multimin_fminimizer_minimum(m.get());
    if (value < best.value) {
      const gsl_vector* x = gsl_multimin_fminimizer_x(m.get());
      best.x.assign(x->data, x->data + dim);
      best.value = value;
    } else {
      break;
    }
  }
  return best;
}

}  // namespace tailmax::detail

#pragma once

namespace cwl {

// Replica kernels run either on the serial reference path or the OpenMP
// path. Both produce identical results; the serial path exists so tests can
// pin the parallel one against it.
enum class ExecMode { serial, openmp };

int hardware_width();

} // namespace cwl

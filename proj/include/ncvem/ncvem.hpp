#pragma once

#include "ncvem/assembly.hpp"
#include "ncvem/convergence.hpp"
#include "ncvem/curves.hpp"
#include "ncvem/errors.hpp"
#include "ncvem/gauss.hpp"
#include "ncvem/jet.hpp"
#include "ncvem/local_forms.hpp"
#include "ncvem/mesh.hpp"
#include "ncvem/mesh_generators.hpp"
#include "ncvem/mesh_io.hpp"
#include "ncvem/poly_basis.hpp"
#include "ncvem/problems.hpp"
#include "ncvem/projectors.hpp"
#include "ncvem/quadrature.hpp"

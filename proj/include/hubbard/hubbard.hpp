#pragma once

#include "hubbard/fock_basis.hpp"
#include "hubbard/lattice.hpp"
#include "hubbard/hamiltonian.hpp"
#include "hubbard/eigensolver.hpp"
#include "hubbard/entanglement.hpp"
#include "hubbard/predictor.hpp"
#include "hubbard/io.hpp"
#include "hubbard/runner.hpp"
#include "hubbard/reproduce.hpp"

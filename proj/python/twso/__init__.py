"""TWSO variational denoising and inpainting."""

from ._twso import (  # noqa: F401
    SolverParams,
    TensorMode,
    TensorParams,
    add_gaussian_noise,
    add_salt_pepper,
    bilaplacian_symbol,
    denoise,
    diffusion_tensor,
    div2,
    hessian,
    inpaint,
    mse,
    psnr,
    random_mask,
    shapes_fixture,
    ssim,
    stripe_fixture,
)

__version__ = "0.1.0"

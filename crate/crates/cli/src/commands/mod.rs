pub mod adversarial;
pub mod consistency;
pub mod equivariance;
pub mod gradcheck;
pub mod verify_spectral;

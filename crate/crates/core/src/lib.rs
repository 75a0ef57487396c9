pub mod bounds;
pub mod families;
pub mod ineq;
pub mod polyring;
pub mod saddle;
pub mod verify;

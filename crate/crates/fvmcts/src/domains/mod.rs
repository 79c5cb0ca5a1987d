pub mod sysadmin;
pub mod drone;

/* planted: x -> y, y -> z and z -> x across three functions */
void step_xy(void)
{
	mutex_lock(&x_lock);
	mutex_lock(&y_lock);
	mutex_unlock(&y_lock);
	mutex_unlock(&x_lock);
}

void step_yz(void)
{
	mutex_lock(&y_lock);
	mutex_lock(&z_lock);
	mutex_unlock(&z_lock);
	mutex_unlock(&y_lock);
}

void step_zx(void)
{
	mutex_lock(&z_lock);
	mutex_lock(&x_lock);
	mutex_unlock(&x_lock);
	mutex_unlock(&z_lock);
}

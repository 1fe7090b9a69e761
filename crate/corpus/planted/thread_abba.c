/* planted: two paths take a_lock and b_lock in opposite orders */
void transfer_ab(void)
{
	mutex_lock(&a_lock);
	mutex_lock(&b_lock);
	move(1);
	mutex_unlock(&b_lock);
	mutex_unlock(&a_lock);
}

void transfer_ba(void)
{
	mutex_lock(&b_lock);
	mutex_lock(&a_lock);
	move(2);
	mutex_unlock(&a_lock);
	mutex_unlock(&b_lock);
}

/* planted: irq_lock and dev_spin nest both ways */
void irq_handler(struct dev *d)
{
	spin_lock(&irq_lock);
	spin_lock(&d->dev_spin);
	ack(d);
	spin_unlock(&d->dev_spin);
	spin_unlock(&irq_lock);
}

void dev_reset(struct dev *d)
{
	spin_lock(&d->dev_spin);
	spin_lock(&irq_lock);
	reset(d);
	spin_unlock(&irq_lock);
	spin_unlock(&d->dev_spin);
}
